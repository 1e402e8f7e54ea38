//! Python bindings; see python/smoke_test.py for usage.
