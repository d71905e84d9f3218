//! On-disk instance format shared by `check`, `verify` reports, and
//! `render`.

use serde::{Deserialize, Serialize};

use wbk_core::ideal::Ideal;
use wbk_core::plfn::PlFunction;
use wbk_core::poset::FinitePoset;
use wbk_core::region::Region;
use wbk_core::scalar::{rat_string, Rat};

/// One problem instance. The `kind` tag selects the payload.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Instance {
    /// A pair of open sets and an ambient region for compact containment.
    Region { u: Region, v: Region, k: Region },
    /// A scalar pair of positive functions on a shared compact space.
    Cuntz { a: PlFunction, b: PlFunction },
    /// Factor quadruple for tensor way-below comparison.
    Tensor { a1: PlFunction, b1: PlFunction, a2: PlFunction, b2: PlFunction },
    /// A finite poset and a pair of element ids.
    Poset { poset: FinitePoset, x: usize, y: usize },
    /// A pair of ideals over a shared ambient.
    Ideal { i: Ideal, j: Ideal },
    /// A function together with a cutdown level, for rendering.
    Cutdown {
        f: PlFunction,
        #[serde(with = "rat_string")]
        epsilon: Rat,
    },
}
