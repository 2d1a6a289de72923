//! Published low-order Weil-Petersson correlators, used as regression vectors.

use crate::poly::CorrelatorPoly;
use crate::scalar::PiScalar;

type Entry = (u32, usize, &'static [(&'static [u32], &'static str)]);

/// `(g, n, [(key, coefficient)])` as printed in the literature.
const TABLE: &[Entry] = &[
    (0, 3, &[(&[0, 0, 0], "1")]),
    (1, 1, &[(&[1], "1/8"), (&[0], "1/12*pi^2")]),
    (0, 4, &[(&[0, 0, 0, 0], "2*pi^2"), (&[1, 0, 0, 0], "3")]),
    (
        1,
        2,
        &[
            (&[0, 0], "1/4*pi^4"),
            (&[1, 0], "1/2*pi^2"),
            (&[2, 0], "5/8"),
            (&[1, 1], "3/8"),
        ],
    ),
    (
        0,
        5,
        &[
            (&[0, 0, 0, 0, 0], "10*pi^4"),
            (&[1, 0, 0, 0, 0], "18*pi^2"),
            (&[2, 0, 0, 0, 0], "15"),
            (&[1, 1, 0, 0, 0], "18"),
        ],
    ),
    (
        2,
        1,
        &[
            (&[0], "29/192*pi^8"),
            (&[1], "338/960*pi^6"),
            (&[2], "139/192*pi^4"),
            (&[3], "203/192*pi^2"),
            (&[4], "315/384"),
        ],
    ),
];

/// `V_{2,0}`.
pub const CLOSED_VOLUME_GENUS_2: &str = "43/2160*pi^6";

pub fn reference_correlators() -> Vec<CorrelatorPoly> {
    TABLE
        .iter()
        .map(|(g, n, terms)| {
            CorrelatorPoly::from_terms(
                *g,
                *n,
                terms.iter().map(|(d, c)| {
                    let c: PiScalar = c.parse().expect("reference coefficient");
                    (d.to_vec(), c)
                }),
            )
        })
        .collect()
}
