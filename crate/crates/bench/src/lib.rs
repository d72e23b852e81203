//! Empty library target; this package exists for its `benches/`.
