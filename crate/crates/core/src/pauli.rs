use std::fmt;

/// Single-qubit Pauli, encoded as (x, z) bits so products are XORs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn x_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn z_bit(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    /// Product up to phase.
    pub fn mul(self, other: Pauli) -> Pauli {
        Pauli::from_bits(self.x_bit() ^ other.x_bit(), self.z_bit() ^ other.z_bit())
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        (self.x_bit() & other.z_bit()) ^ (self.z_bit() & other.x_bit())
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}
