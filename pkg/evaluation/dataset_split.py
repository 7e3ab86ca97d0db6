import random
from collections import defaultdict
from typing import Dict, Iterable, List, Tuple


class TooFewIssues(ValueError):
    """Raised when a project cannot give one issue to the test split and keep one for training."""


def group_by_project(issue_keys: Iterable[str]) -> Dict[str, List[str]]:
    grouped: Dict[str, List[str]] = defaultdict(list)
    for key in issue_keys:
        grouped[key.split("-")[0]].append(key)
    return {project: sorted(set(keys)) for project, keys in grouped.items()}


def split_dataset(issues_by_project: Dict[str, List[str]], seed: int) -> Tuple[List[str], List[str]]:
    """
    Un issue aleatorio por proyecto va a test; el resto a entrenamiento.
    Determinista dada la semilla.
    """
    rng = random.Random(seed)
    train, test = [], []

    for project in sorted(issues_by_project):
        keys = sorted(issues_by_project[project])
        if len(keys) < 2:
            raise TooFewIssues(f"Project {project} has {len(keys)} issue(s); at least 2 are needed")
        chosen = rng.choice(keys)
        test.append(chosen)
        train.extend(k for k in keys if k != chosen)

    return sorted(train), sorted(test)
