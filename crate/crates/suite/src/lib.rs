//! Empty: the checks live in tests/acceptance.rs.
