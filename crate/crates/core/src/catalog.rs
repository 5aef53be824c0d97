//! Named symmetric spaces.

use crate::error::{Error, Result};
use crate::lie::{sl_n, so_n1, sp_n1, su_n1, LieAlgebraData};
use crate::roots::{nilpotent_model, nilpotent_structure, restricted_roots, NilpotentData, RestrictedRootSystem};

/// Every key accepted by [`algebra`] or [`nilpotent`] in the standard suite.
pub const SPACES: [&str; 12] = ["H2", "H3", "H4", "H5", "CH4", "CH6", "HH8", "OH16", "SL3", "SL4", "H2xH2", "H3xSL3"];

/// Spaces with a matrix model (all but the octonionic plane).
pub const MATRIX_SPACES: [&str; 11] = ["H2", "H3", "H4", "H5", "CH4", "CH6", "HH8", "SL3", "SL4", "H2xH2", "H3xSL3"];

fn parse_suffix(key: &str, prefix: &str) -> Option<usize> {
    key.strip_prefix(prefix).and_then(|s| s.parse().ok())
}

/// Lie algebra of the isometry group. Products are written `AxB`.
pub fn algebra(key: &str) -> Result<LieAlgebraData> {
    if let Some((a, b)) = key.split_once('x') {
        let ga = algebra(a)?;
        let gb = algebra(b)?;
        return Ok(LieAlgebraData::direct_sum(key, &ga, &gb));
    }
    let bad = || Error::UnknownSpace(key.to_string());
    if key.starts_with("OH") {
        return Err(Error::Unsupported(format!("{key} has no matrix model; use the nilpotent model")));
    }
    if let Some(n) = parse_suffix(key, "HH") {
        if n % 4 != 0 || n < 8 {
            return Err(bad());
        }
        return sp_n1(n / 4);
    }
    if let Some(n) = parse_suffix(key, "CH") {
        if n % 2 != 0 || n < 4 {
            return Err(bad());
        }
        return su_n1(n / 2);
    }
    if let Some(n) = parse_suffix(key, "SL") {
        if n < 2 {
            return Err(bad());
        }
        return sl_n(n);
    }
    if let Some(n) = parse_suffix(key, "H") {
        if n < 2 {
            return Err(bad());
        }
        return so_n1(n);
    }
    Err(bad())
}

pub fn root_system(key: &str) -> Result<RestrictedRootSystem> {
    restricted_roots(&algebra(key)?)
}

/// Nilpotent structure constants; `OH16` comes from the octonionic model.
pub fn nilpotent(key: &str) -> Result<NilpotentData> {
    if key == "OH16" {
        return nilpotent_model(8, 1, None);
    }
    nilpotent_structure(&root_system(key)?)
}

/// Dimension of the symmetric space.
pub fn manifold_dim(key: &str) -> Result<usize> {
    if key == "OH16" {
        return Ok(16);
    }
    Ok(algebra(key)?.np)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_matrix_spaces_build() {
        let dims = [2, 3, 4, 5, 4, 6, 8, 5, 9, 4, 8];
        for (k, d) in MATRIX_SPACES.iter().zip(dims) {
            assert_eq!(manifold_dim(k).unwrap(), d, "{k}");
        }
        assert!(algebra("XY").is_err());
        assert!(algebra("CH5").is_err());
    }
}
