use std::fmt;

/// Index of a qubit in the global allocation. Qubit 0 is the least
/// significant bit of a basis-state index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitId(pub usize);

impl QubitId {
    pub fn index(self) -> usize {
        self.0
    }

    pub fn mask(self) -> usize {
        1usize << self.0
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

/// Consecutive qubit ids `start .. start + len`.
pub fn qubit_range(start: usize, len: usize) -> Vec<QubitId> {
    (start..start + len).map(QubitId).collect()
}

/// A control condition: the gate fires only when `qubit` is in state
/// `polarity` (`false` is an open-circle 0-control).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Control {
    pub qubit: QubitId,
    pub polarity: bool,
}

impl Control {
    pub fn one(qubit: QubitId) -> Self {
        Control {
            qubit,
            polarity: true,
        }
    }

    pub fn zero(qubit: QubitId) -> Self {
        Control {
            qubit,
            polarity: false,
        }
    }

    pub fn negated(self) -> Self {
        Control {
            qubit: self.qubit,
            polarity: !self.polarity,
        }
    }
}

impl fmt::Display for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{})",
            self.qubit.0,
            if self.polarity { '+' } else { '-' }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    H,
    X,
    I,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub op: Op,
    pub target: QubitId,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn h(target: QubitId) -> Self {
        Gate {
            op: Op::H,
            target,
            controls: Vec::new(),
        }
    }

    pub fn x(target: QubitId) -> Self {
        Gate {
            op: Op::X,
            target,
            controls: Vec::new(),
        }
    }

    pub fn identity(target: QubitId) -> Self {
        Gate {
            op: Op::I,
            target,
            controls: Vec::new(),
        }
    }

    pub fn cnot(control: QubitId, target: QubitId) -> Self {
        Gate::mcx(vec![Control::one(control)], target)
    }

    pub fn toffoli(c0: QubitId, c1: QubitId, target: QubitId) -> Self {
        Gate::mcx(vec![Control::one(c0), Control::one(c1)], target)
    }

    pub fn mcx(controls: Vec<Control>, target: QubitId) -> Self {
        Gate {
            op: Op::X,
            target,
            controls,
        }
    }

    /// Netlist name: X-type gates are named by their control count.
    pub fn kind(&self) -> &'static str {
        match (self.op, self.controls.len()) {
            (Op::H, 0) => "H",
            (Op::H, _) => "CH",
            (Op::I, _) => "I",
            (Op::X, 0) => "X",
            (Op::X, 1) => "CNOT",
            (Op::X, 2) => "Toffoli",
            (Op::X, _) => "MultiControlledX",
        }
    }

    pub fn qubits(&self) -> impl Iterator<Item = QubitId> + '_ {
        std::iter::once(self.target).chain(self.controls.iter().map(|c| c.qubit))
    }

    /// Bit mask over the control qubits and the value they must hold.
    pub fn control_mask(&self) -> (usize, usize) {
        self.controls.iter().fold((0, 0), |(mask, value), c| {
            (
                mask | c.qubit.mask(),
                if c.polarity {
                    value | c.qubit.mask()
                } else {
                    value
                },
            )
        })
    }

    /// Whether the gate fires on computational basis state `index`.
    pub fn fires_on(&self, index: usize) -> bool {
        let (mask, value) = self.control_mask();
        index & mask == value
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GATE {} targets=[{}] controls=[",
            self.kind(),
            self.target.0
        )?;
        for (i, c) in self.controls.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}
