"""Problem generators, data ingestion, metrics and the command-line interface."""
