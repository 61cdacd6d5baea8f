"""CLI, report rendering and the HTTP JSON service."""
