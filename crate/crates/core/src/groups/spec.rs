use std::fmt;
use std::str::FromStr;

use super::{build_abelian, build_dihedral, build_heisenberg, build_meta144, FiniteGroup};
use crate::error::{QfError, Result};

/// Parsed form of the group spec strings `dihedral:<n>`, `heisenberg:<K>`,
/// `meta144` and `abelian:<K>x<M>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Dihedral(usize),
    Heisenberg(usize),
    Meta144,
    Abelian(usize, usize),
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup> {
        match *self {
            GroupSpec::Dihedral(n) => build_dihedral(n),
            GroupSpec::Heisenberg(k) => build_heisenberg(k),
            GroupSpec::Meta144 => Ok(build_meta144()),
            GroupSpec::Abelian(k, m) => build_abelian(k, m),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = QfError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || QfError::UnknownGroupSpec(s.to_string());
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let s_trim = s.trim();
        if s_trim.eq_ignore_ascii_case("meta144") {
            return Ok(GroupSpec::Meta144);
        }
        let (head, tail) = s_trim.split_once(':').ok_or_else(bad)?;
        match head.to_ascii_lowercase().as_str() {
            "dihedral" => Ok(GroupSpec::Dihedral(num(tail)?)),
            "heisenberg" => Ok(GroupSpec::Heisenberg(num(tail)?)),
            "abelian" => {
                let (k, m) = tail.split_once(['x', 'X']).ok_or_else(bad)?;
                Ok(GroupSpec::Abelian(num(k)?, num(m)?))
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Dihedral(n) => write!(f, "dihedral:{n}"),
            GroupSpec::Heisenberg(k) => write!(f, "heisenberg:{k}"),
            GroupSpec::Meta144 => write!(f, "meta144"),
            GroupSpec::Abelian(k, m) => write!(f, "abelian:{k}x{m}"),
        }
    }
}
