"""SQLite run ledger."""
