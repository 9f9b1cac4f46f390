"""Package version, embedded in cache entries and artifact manifests."""

CODE_VERSION = "0.1.0"
