use std::fmt;

/// A permutation of the four vertex slots; `p.0[i]` is the image of `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm4(pub [u8; 4]);

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    pub fn new(images: [u8; 4]) -> Option<Self> {
        let mut seen = [false; 4];
        for &x in &images {
            if x > 3 || seen[x as usize] {
                return None;
            }
            seen[x as usize] = true;
        }
        Some(Perm4(images))
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn inverse(&self) -> Perm4 {
        let mut out = [0u8; 4];
        for i in 0..4 {
            out[self.0[i] as usize] = i as u8;
        }
        Perm4(out)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Perm4) -> Perm4 {
        let mut out = [0u8; 4];
        for i in 0..4 {
            out[i] = self.0[other.0[i] as usize];
        }
        Perm4(out)
    }

    pub fn is_even(&self) -> bool {
        let mut inv = 0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                if self.0[i] > self.0[j] {
                    inv += 1;
                }
            }
        }
        inv % 2 == 0
    }

    pub fn all() -> Vec<Perm4> {
        let mut out = Vec::with_capacity(24);
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    for d in 0..4u8 {
                        if let Some(p) = Perm4::new([a, b, c, d]) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    /// Parses the 4-digit form `"1023"`.
    pub fn parse(s: &str) -> Option<Perm4> {
        let b = s.as_bytes();
        if b.len() != 4 {
            return None;
        }
        let mut out = [0u8; 4];
        for i in 0..4 {
            if !(b'0'..=b'3').contains(&b[i]) {
                return None;
            }
            out[i] = b[i] - b'0';
        }
        Perm4::new(out)
    }
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}{}", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

/// The six edges as slot pairs, in index order.
pub const EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn edge_index(i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    EDGES.iter().position(|&e| e == (a, b)).expect("distinct slots")
}

/// Slots of face `f` (the face opposite vertex `f`), ascending.
pub fn face_slots(f: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut k = 0;
    for s in 0..4 {
        if s != f {
            out[k] = s;
            k += 1;
        }
    }
    out
}
