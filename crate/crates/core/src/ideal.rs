//! The dictionary between closed ideals of a function algebra on a compact
//! space and open subsets of that space.
//!
//! An ideal is represented purely by its carrier: the open set `U` with
//! `I = C0(U)`, the functions vanishing outside `U`. Generator lists are
//! optional; when present the carrier is the union of their open supports
//! and the vanishing locus is its complement.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plfn::PlFunction;
use crate::region::{Region, Space};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawIdeal", into = "RawIdeal")]
pub struct Ideal {
    ambient: Space,
    carrier: Region,
    generators: Option<Vec<PlFunction>>,
}

#[derive(Serialize, Deserialize)]
struct RawIdeal {
    ambient: Region,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    carrier: Option<Region>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    generators: Option<Vec<PlFunction>>,
}

impl TryFrom<RawIdeal> for Ideal {
    type Error = Error;
    fn try_from(raw: RawIdeal) -> Result<Self> {
        let ambient = Space::new(raw.ambient)?;
        match (raw.carrier, raw.generators) {
            (Some(carrier), None) => Ideal::new(ambient, carrier),
            (None, Some(gens)) => Ideal::from_generators(&ambient, gens),
            _ => Err(Error::BadRegion(
                "ideal needs exactly one of carrier or generators".into(),
            )),
        }
    }
}

impl From<Ideal> for RawIdeal {
    fn from(i: Ideal) -> RawIdeal {
        // Generator-built ideals keep their generators in the emitted form;
        // the carrier is recomputed on the way back in.
        match i.generators {
            Some(gens) => RawIdeal {
                ambient: i.ambient.region().clone(),
                carrier: None,
                generators: Some(gens),
            },
            None => RawIdeal {
                ambient: i.ambient.region().clone(),
                carrier: Some(i.carrier),
                generators: None,
            },
        }
    }
}

/// Common zero set of a generator list: the ambient minus the union of the
/// open supports; closed in the ambient. Every generator is verified to
/// vanish on it.
pub fn vanishing_locus(generators: &[PlFunction], k: &Space) -> Result<Region> {
    let mut union = Region::empty(k.dim());
    for g in generators {
        if g.space() != k {
            return Err(Error::SpaceMismatch);
        }
        union = union.union(&g.open_support())?;
    }
    let locus = k.region().difference(&union)?;
    for g in generators {
        if !g.open_support().intersect(&locus)?.is_empty() {
            return Err(Error::Internal("generator fails to vanish on the locus".into()));
        }
    }
    Ok(locus)
}

impl Ideal {
    /// Ideal `C0(carrier)` inside functions on a compact ambient space. The
    /// carrier must be open in the ambient.
    pub fn new(ambient: Space, carrier: Region) -> Result<Self> {
        if !ambient.is_compact() {
            return Err(Error::NotCompact);
        }
        if !ambient.is_open_in(&carrier)? {
            return Err(Error::NotOpen);
        }
        Ok(Ideal { ambient, carrier, generators: None })
    }

    /// Smallest closed ideal containing the generators: carrier is the union
    /// of their open supports.
    pub fn from_generators(k: &Space, generators: Vec<PlFunction>) -> Result<Self> {
        let locus = vanishing_locus(&generators, k)?;
        let carrier = k.region().difference(&locus)?;
        let mut ideal = Ideal::new(k.clone(), carrier)?;
        ideal.generators = Some(generators);
        Ok(ideal)
    }

    /// The zero ideal.
    pub fn zero(k: &Space) -> Result<Self> {
        Ideal::new(k.clone(), Region::empty(k.dim()))
    }

    pub fn ambient(&self) -> &Space {
        &self.ambient
    }

    pub fn carrier(&self) -> &Region {
        &self.carrier
    }

    pub fn generators(&self) -> Option<&[PlFunction]> {
        self.generators.as_deref()
    }

    /// Vanishing locus of the ideal: ambient minus carrier.
    pub fn locus(&self) -> Result<Region> {
        self.ambient.region().difference(&self.carrier)
    }

    /// Whether a function belongs to the ideal: its support is contained in
    /// the carrier.
    pub fn contains(&self, f: &PlFunction) -> Result<bool> {
        if f.space() != &self.ambient {
            return Err(Error::SpaceMismatch);
        }
        f.open_support().is_subset(&self.carrier)
    }

    /// A proper ideal misses some of the ambient: carrier strictly smaller
    /// than the space, equivalently a nonempty vanishing locus, equivalently
    /// (when generators are known and the ambient is 1D) the generator sum
    /// failing to be strictly positive. All available characterizations are
    /// computed and must agree.
    pub fn is_proper(&self) -> Result<bool> {
        let by_carrier = self.carrier != *self.ambient.region();
        let by_locus = !self.locus()?.is_empty();
        if by_carrier != by_locus {
            return Err(Error::Internal("properness characterizations disagree".into()));
        }
        if let Some(gens) = &self.generators {
            let mut sum = PlFunction::zero(&self.ambient)?;
            for g in gens {
                sum = sum.add(g)?;
            }
            let strictly_positive = if self.ambient.region().is_empty() {
                true
            } else {
                sum.min_over(self.ambient.region())?.is_positive()
            };
            if by_carrier != !strictly_positive {
                return Err(Error::Internal(
                    "strict positivity disagrees with the carrier test".into(),
                ));
            }
        }
        Ok(by_carrier)
    }

    /// Compact containment of ideals: compact containment of the carriers in
    /// the shared ambient.
    pub fn compactly_contained(&self, other: &Ideal) -> Result<bool> {
        if self.ambient != other.ambient {
            return Err(Error::SpaceMismatch);
        }
        self.ambient.compactly_contained(&self.carrier, &other.carrier)
    }

    /// Tensor product: the ideal on the product ambient carried by the
    /// product of the carriers.
    pub fn tensor(&self, other: &Ideal) -> Result<Ideal> {
        let ambient = self.ambient.product(&other.ambient)?;
        Ideal::new(ambient, self.carrier.product(&other.carrier))
    }
}
