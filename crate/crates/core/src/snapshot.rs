//! Binary snapshot files for gauge fields and one-forms.
//!
//! Layout: magic `LGT2SNAP` (8 bytes), format version u32, group tag
//! (4 bytes, NUL-padded), kind u8 (0 = gauge field, 1 = one-form),
//! scale N u32, provenance length u32 + UTF-8 provenance string, then the
//! bond values as little-endian f64 in row-major (offset, direction,
//! position) order. For direction e_1 the offset is y and the position x;
//! for e_2 the offset is x and the position y. Round-trips are bit-exact.

use crate::field::{GaugeField, OneForm};
use crate::group::{AlgebraVector, LieGroup};
use crate::lattice::{side, Axis, Bond, Coord, Scale};
use std::io::{Read, Write};

pub const MAGIC: &[u8; 8] = b"LGT2SNAP";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic: not a snapshot file")]
    BadMagic,
    #[error("unsupported snapshot version {0}")]
    BadVersion(u32),
    #[error("snapshot holds group {found:?}, expected {expected:?}")]
    GroupMismatch { found: String, expected: String },
    #[error("snapshot kind {found} where {expected} was expected")]
    KindMismatch { found: u8, expected: u8 },
    #[error("malformed snapshot: {0}")]
    Malformed(&'static str),
}

pub const KIND_FIELD: u8 = 0;
pub const KIND_FORM: u8 = 1;

fn group_tag<G: LieGroup>() -> [u8; 4] {
    let mut tag = [0u8; 4];
    for (t, b) in tag.iter_mut().zip(G::NAME.bytes()) {
        *t = b;
    }
    tag
}

/// Bonds of Λ_N in the on-disk (offset, direction, position) order.
fn disk_bonds(n: Scale) -> impl Iterator<Item = Bond> {
    let s = side(n);
    (0..s).flat_map(move |offset| {
        Axis::BOTH.into_iter().flat_map(move |axis| {
            (0..s).map(move |pos| {
                let base = match axis {
                    Axis::E1 => Coord { n, x: pos, y: offset },
                    Axis::E2 => Coord { n, x: offset, y: pos },
                };
                Bond::positive(base, axis)
            })
        })
    })
}

fn write_header<G: LieGroup>(
    w: &mut impl Write,
    kind: u8,
    n: Scale,
    provenance: &str,
) -> Result<(), SnapshotError> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&group_tag::<G>())?;
    w.write_all(&[kind])?;
    w.write_all(&n.to_le_bytes())?;
    w.write_all(&(provenance.len() as u32).to_le_bytes())?;
    w.write_all(provenance.as_bytes())?;
    Ok(())
}

fn read_header<G: LieGroup>(
    r: &mut impl Read,
    expected_kind: u8,
) -> Result<(Scale, String), SnapshotError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(SnapshotError::BadMagic);
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != VERSION {
        return Err(SnapshotError::BadVersion(version));
    }
    let mut tag = [0u8; 4];
    r.read_exact(&mut tag)?;
    if tag != group_tag::<G>() {
        let found = tag.iter().take_while(|&&b| b != 0).map(|&b| b as char).collect();
        return Err(SnapshotError::GroupMismatch { found, expected: G::NAME.to_string() });
    }
    let mut kind = [0u8; 1];
    r.read_exact(&mut kind)?;
    if kind[0] != expected_kind {
        return Err(SnapshotError::KindMismatch { found: kind[0], expected: expected_kind });
    }
    r.read_exact(&mut u32buf)?;
    let n = u32::from_le_bytes(u32buf);
    if n > 16 {
        return Err(SnapshotError::Malformed("scale out of range"));
    }
    r.read_exact(&mut u32buf)?;
    let plen = u32::from_le_bytes(u32buf) as usize;
    let mut pbuf = vec![0u8; plen];
    r.read_exact(&mut pbuf)?;
    let provenance =
        String::from_utf8(pbuf).map_err(|_| SnapshotError::Malformed("provenance not UTF-8"))?;
    Ok((n, provenance))
}

fn write_floats(w: &mut impl Write, vals: &[f64]) -> std::io::Result<()> {
    for v in vals {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_floats(r: &mut impl Read, count: usize) -> std::io::Result<Vec<f64>> {
    let mut buf = vec![0u8; 8 * count];
    r.read_exact(&mut buf)?;
    Ok(buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

pub fn write_field<G: LieGroup>(
    w: &mut impl Write,
    u: &GaugeField<G>,
    provenance: &str,
) -> Result<(), SnapshotError> {
    write_header::<G>(w, KIND_FIELD, u.n, provenance)?;
    for b in disk_bonds(u.n) {
        write_floats(w, &G::point_coords(u.get(b)))?;
    }
    Ok(())
}

pub fn read_field<G: LieGroup>(
    r: &mut impl Read,
) -> Result<(GaugeField<G>, String), SnapshotError> {
    let (n, provenance) = read_header::<G>(r, KIND_FIELD)?;
    let mut u = GaugeField::<G>::identity(n);
    for b in disk_bonds(n) {
        let coords = read_floats(r, G::POINT_FLOATS)?;
        u.set(b, G::point_from_coords(&coords));
    }
    Ok((u, provenance))
}

pub fn write_form<G: LieGroup>(
    w: &mut impl Write,
    a: &OneForm<G>,
    provenance: &str,
) -> Result<(), SnapshotError> {
    write_header::<G>(w, KIND_FORM, a.n, provenance)?;
    for b in disk_bonds(a.n) {
        write_floats(w, &a.get(b).coords())?;
    }
    Ok(())
}

pub fn read_form<G: LieGroup>(r: &mut impl Read) -> Result<(OneForm<G>, String), SnapshotError> {
    let (n, provenance) = read_header::<G>(r, KIND_FORM)?;
    let mut a = OneForm::<G>::zero(n);
    for b in disk_bonds(n) {
        let coords = read_floats(r, G::Vector::DIM)?;
        a.set(b, G::Vector::from_coords(&coords));
    }
    Ok((a, provenance))
}
