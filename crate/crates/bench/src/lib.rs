//! Shared fixtures for the benchmarks in `benches/`.

use nullity_core::nk::{builtin, NkFrame};
use nullity_core::ManifoldSpec;

/// Spec of a built-in entry; panics on unknown names.
pub fn spec(name: &str) -> ManifoldSpec {
    builtin(name)
        .unwrap_or_else(|| panic!("no built-in manifold '{name}'"))
        .spec
}

/// A structured frame at the first deterministic sample point.
pub fn nk_frame(name: &str, max_ell: usize) -> NkFrame {
    let s = spec(name);
    let p = s.sample_points(1, 0).remove(0);
    NkFrame::at(&s, &p, max_ell).expect("built-in frames evaluate")
}
