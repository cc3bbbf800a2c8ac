"""Command-line front end: configuration, command dispatch and output emission."""
