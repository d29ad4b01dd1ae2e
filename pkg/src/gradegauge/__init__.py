"""gradegauge: decision-tree training and pass/fail prediction for student
admission records, with code emission, durable storage, a CLI, and an HTTP
service."""

__version__ = "0.1.0"
