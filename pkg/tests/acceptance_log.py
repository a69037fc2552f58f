"""Collects one verdict line per acceptance criterion."""

import contextlib
import time

_results = {}


@contextlib.contextmanager
def criterion(number, title):
    start = time.perf_counter()
    detail = {}
    try:
        yield detail
    except BaseException as exc:
        _results[number] = (title, False, time.perf_counter() - start, f"{type(exc).__name__}: {exc}".splitlines()[0])
        raise
    else:
        _results[number] = (title, True, time.perf_counter() - start, detail.get("note", ""))


def lines():
    out = []
    for number in sorted(_results):
        title, ok, secs, note = _results[number]
        tag = "PASS" if ok else "FAIL"
        extra = f" ({note})" if note else ""
        out.append(f"[{tag}] criterion {number}: {title} [{secs:.2f}s]{extra}")
    return out
