"""API layer for petz-geometry: pydantic schemas shared by the CLI and the HTTP app."""
