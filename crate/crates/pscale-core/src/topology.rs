//! PE grids of small photonic tensor-core chiplets.
//!
//! A grid of `pe_rows x pe_cols` chiplets, each an `tile_dim x tile_dim` MAC
//! array, composes into one logical MAC array of the effective dimensions for
//! dataflow purposes; chiplet boundaries only contribute the constant
//! interposer delay applied per fold boundary.

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_TILE_DIM: u64 = 4;

/// A rectangular grid of PTC chiplets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GridTopology {
    pub pe_rows: u64,
    pub pe_cols: u64,
    /// MAC lanes per chiplet edge.
    pub tile_dim: u64,
}

impl GridTopology {
    pub fn new(pe_rows: u64, pe_cols: u64, tile_dim: u64) -> Result<Self> {
        if pe_rows == 0 || pe_cols == 0 || tile_dim == 0 {
            return Err(Error::Config(vec![format!(
                "grid dimensions must be >= 1, got {pe_rows}x{pe_cols} tile {tile_dim}"
            )]));
        }
        Ok(GridTopology {
            pe_rows,
            pe_cols,
            tile_dim,
        })
    }

    pub fn pe_count(&self) -> u64 {
        self.pe_rows * self.pe_cols
    }

    /// Grid label used throughout reports, e.g. `16x32`.
    pub fn label(&self) -> String {
        format!("{}x{}", self.pe_rows, self.pe_cols)
    }
}

impl std::fmt::Display for GridTopology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.pe_rows, self.pe_cols)
    }
}

/// Parses a `RxC` grid label such as `16x32`.
pub fn parse_grid(s: &str, tile_dim: u64) -> Result<GridTopology> {
    let err = || Error::Config(vec![format!("grid must look like `RxC`, got `{s}`")]);
    let (r, c) = s.split_once(['x', 'X']).ok_or_else(err)?;
    let rows: u64 = r.trim().parse().map_err(|_| err())?;
    let cols: u64 = c.trim().parse().map_err(|_| err())?;
    GridTopology::new(rows, cols, tile_dim)
}

/// All aspect ratios for a PE budget: one topology per ordered divisor pair
/// `(r, c)` with `r*c == pe_count`, sorted by `r` ascending.
pub fn enumerate_topologies(pe_count: u64, tile_dim: u64) -> Vec<GridTopology> {
    let mut out = Vec::new();
    for r in 1..=pe_count {
        if pe_count.is_multiple_of(r) {
            out.push(GridTopology {
                pe_rows: r,
                pe_cols: pe_count / r,
                tile_dim,
            });
        }
    }
    out
}

/// Effective MAC-array dimensions `(ar, ac)` of the composed grid.
pub fn effective_dims(t: &GridTopology) -> (u64, u64) {
    (t.pe_rows * t.tile_dim, t.pe_cols * t.tile_dim)
}

/// `min(rows, cols) / max(rows, cols)`: 1 for square grids, shrinking toward
/// 0 as the aspect ratio stretches.
pub fn symmetry_score(t: &GridTopology) -> f64 {
    let lo = t.pe_rows.min(t.pe_cols) as f64;
    let hi = t.pe_rows.max(t.pe_cols) as f64;
    lo / hi
}

/// The squarest grid for a PE budget (ties broken toward fewer rows).
pub fn most_square(pe_count: u64, tile_dim: u64) -> GridTopology {
    enumerate_topologies(pe_count, tile_dim)
        .into_iter()
        .max_by(|a, b| {
            symmetry_score(a)
                .partial_cmp(&symmetry_score(b))
                .unwrap()
                .then(b.pe_rows.cmp(&a.pe_rows))
        })
        .expect("pe_count >= 1 always yields at least (1,1)")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_all_divisor_pairs() {
        let single = enumerate_topologies(1, 4);
        assert_eq!(single.len(), 1);
        assert_eq!((single[0].pe_rows, single[0].pe_cols), (1, 1));

        let twelve = enumerate_topologies(12, 4);
        let pairs: Vec<(u64, u64)> = twelve.iter().map(|t| (t.pe_rows, t.pe_cols)).collect();
        assert_eq!(
            pairs,
            vec![(1, 12), (2, 6), (3, 4), (4, 3), (6, 2), (12, 1)]
        );

        let big = enumerate_topologies(256, 4);
        assert!(big.iter().any(|t| (t.pe_rows, t.pe_cols) == (16, 16)));
        assert!(big.iter().any(|t| (t.pe_rows, t.pe_cols) == (1, 256)));
    }

    /// Oracle: divisor count from trial factorization.
    fn divisor_count(n: u64) -> usize {
        let mut count = 0;
        let mut rem = n;
        let mut result = 1usize;
        let mut p = 2;
        while p * p <= rem {
            if rem.is_multiple_of(p) {
                let mut exp = 0;
                while rem.is_multiple_of(p) {
                    rem /= p;
                    exp += 1;
                }
                result *= exp + 1;
            }
            p += 1;
        }
        if rem > 1 {
            result *= 2;
        }
        count += result;
        count
    }

    #[test]
    fn enumeration_count_matches_factorization_oracle() {
        for n in 1..=4096 {
            let topos = enumerate_topologies(n, 4);
            assert_eq!(topos.len(), divisor_count(n), "pe_count {n}");
            for t in &topos {
                assert_eq!(t.pe_rows * t.pe_cols, n);
            }
        }
    }

    #[test]
    fn effective_dims_examples() {
        let t = GridTopology::new(16, 16, 4).unwrap();
        assert_eq!(effective_dims(&t), (64, 64));
        let t = GridTopology::new(1, 256, 4).unwrap();
        assert_eq!(effective_dims(&t), (4, 1024));
        let t = GridTopology::new(8, 16, 1).unwrap();
        assert_eq!(effective_dims(&t), (8, 16));
    }

    #[test]
    fn effective_dims_scale_linearly_in_tile() {
        for tile in 1..=8 {
            let t = GridTopology::new(3, 5, tile).unwrap();
            assert_eq!(effective_dims(&t), (3 * tile, 5 * tile));
        }
    }

    #[test]
    fn symmetry_examples() {
        assert_eq!(symmetry_score(&GridTopology::new(16, 16, 4).unwrap()), 1.0);
        assert_eq!(symmetry_score(&GridTopology::new(16, 32, 4).unwrap()), 0.5);
        let linear = symmetry_score(&GridTopology::new(1, 512, 4).unwrap());
        assert!((linear - 1.0 / 512.0).abs() < 1e-12);
    }

    #[test]
    fn symmetry_strictly_decreases_as_aspect_stretches() {
        let scores: Vec<f64> = enumerate_topologies(64, 4)
            .iter()
            .filter(|t| t.pe_rows <= t.pe_cols)
            .map(symmetry_score)
            .collect();
        // (1,64),(2,32),(4,16),(8,8) -> strictly increasing toward square
        for pair in scores.windows(2) {
            assert!(pair[0] < pair[1]);
        }
    }

    #[test]
    fn grid_labels_parse_back() {
        let t = GridTopology::new(16, 32, 4).unwrap();
        assert_eq!(t.label(), "16x32");
        assert_eq!(parse_grid("16x32", 4).unwrap(), t);
        assert!(parse_grid("16by32", 4).is_err());
        assert!(parse_grid("0x4", 4).is_err());
    }

    #[test]
    fn most_square_prefers_fewer_rows_on_tie() {
        let t = most_square(512, 4);
        assert_eq!((t.pe_rows, t.pe_cols), (16, 32));
        let sq = most_square(256, 4);
        assert_eq!((sq.pe_rows, sq.pe_cols), (16, 16));
    }
}
