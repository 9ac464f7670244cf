"""Shared sink for the acceptance suite's per-criterion PASS lines."""

LINES = []


def record(line):
    LINES.append(line)
