"""Command-line front end: formula syntax, scenarios and reports."""
