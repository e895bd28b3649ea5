//! Fixture library: concrete functions, protocols, and their analytically
//! matched ideal adversaries.

pub mod appendix;
pub mod custom;
pub mod disj;
pub mod functions;
pub mod noise;
pub mod reveal;

use crate::proto::{ClassicalFunction, IdealAdversary, TwoPartyProtocol};
use crate::Result;

pub use appendix::{appendix_protocol, two_copies_simulator_check, TwoCopiesReport};
pub use custom::{load_custom_fixture, CustomFixture};
pub use disj::{disj_perturbed_fixture, disj_quantum_fixture, DisjTightnessStudy};
pub use functions::{make_function, FunctionKind};
pub use noise::{depolarize_fixture, depolarize_fixture_on};
pub use reveal::classical_reveal_protocol;

/// A runnable protocol instance: function, protocol, matching ideal
/// adversary, and optional message noise rate.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub id: String,
    pub function: ClassicalFunction,
    pub protocol: TwoPartyProtocol,
    pub ideal_adversary: IdealAdversary,
    pub noise: Option<f64>,
    pub notes: String,
}

impl Fixture {
    pub fn with_id(mut self, id: &str) -> Fixture {
        self.id = id.to_string();
        self
    }
}

/// Catalog of the bundled base fixtures, addressable by id.
pub fn catalog() -> Result<Vec<Fixture>> {
    let mut out = Vec::new();
    for (kind, tag, ns) in [
        (FunctionKind::Eq, "eq", &[1usize, 2][..]),
        (FunctionKind::Ip, "ip", &[1, 2][..]),
        (FunctionKind::Disj, "disj", &[2][..]),
        (FunctionKind::Const, "const", &[1][..]),
    ] {
        for &n in ns {
            let f = make_function(kind, n)?;
            let fixture =
                classical_reveal_protocol(&f)?.with_id(&format!("reveal-{tag}-n{n}"));
            out.push(fixture);
        }
    }
    out.push(appendix_protocol(1)?.with_id("appendix-ot-n1"));
    Ok(out)
}

/// Looks up a base fixture by id.
pub fn by_id(id: &str) -> Result<Fixture> {
    catalog()?
        .into_iter()
        .find(|fx| fx.id == id)
        .ok_or_else(|| crate::Error::Config(format!("unknown fixture id {id}")))
}
