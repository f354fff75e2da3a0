"""End-to-end tests for swampcast."""
