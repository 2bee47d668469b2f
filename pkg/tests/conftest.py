import os

# size bounds, weights and Baumslag invariants raise instead of only logging
os.environ.setdefault("POWERCIRCUIT_STRICT", "1")

from hypothesis import settings  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def pytest_collection_modifyitems(items):
    # the size-bound criterion inspects every extend_tree call, so it goes last
    last = [it for it in items if it.name == "test_criterion_05_extend_tree_size_bound"]
    items[:] = [it for it in items if it not in last] + last


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
