//! Binary field format.
//!
//! Layout, all little endian: magic `SPSF`, version `u32`, grid kind `u8`
//! (0 radial, 1 box), dims (`u64`, one for radial, three for box), spacing
//! `f64`, scale factor `f64`, then the nodal values as `f64` in row-major
//! order. For a radial grid the stored dim is the node parameter `n`, so
//! `n - 1` values follow.

use std::io::{Read, Write};

use super::field::{Field, Mesh};
use super::grid::{BoxBoundary, BoxGrid, Grid, RadialGrid};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"SPSF";
const VERSION: u32 = 1;

pub fn write_field<W: Write>(u: &Field, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    match u.grid() {
        Grid::Radial(g) => {
            out.write_all(&[0u8])?;
            out.write_all(&(g.n() as u64).to_le_bytes())?;
        }
        Grid::Box(g) => {
            if g.boundary() != BoxBoundary::Dirichlet {
                return Err(Error::Format("only Dirichlet boxes can be stored".into()));
            }
            out.write_all(&[1u8])?;
            for _ in 0..3 {
                out.write_all(&(g.n() as u64).to_le_bytes())?;
            }
        }
    }
    out.write_all(&u.grid().h().to_le_bytes())?;
    out.write_all(&u.scale_factor().to_le_bytes())?;
    let mut buf = Vec::with_capacity(8 * u.len());
    for v in u.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

fn read_exact<R: Read, const N: usize>(r: &mut R, what: &str) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(|_| Error::Format(format!("truncated header while reading {what}")))?;
    Ok(b)
}

pub fn read_field<R: Read>(mut r: R) -> Result<Field> {
    let magic: [u8; 4] = read_exact(&mut r, "magic")?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic, not an SPSF file".into()));
    }
    let version = u32::from_le_bytes(read_exact(&mut r, "version")?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let kind = read_exact::<_, 1>(&mut r, "grid kind")?[0];
    let dims: Vec<u64> = match kind {
        0 => vec![u64::from_le_bytes(read_exact(&mut r, "dims")?)],
        1 => (0..3).map(|_| read_exact(&mut r, "dims").map(u64::from_le_bytes)).collect::<Result<_>>()?,
        k => return Err(Error::Format(format!("unknown grid kind {k}"))),
    };
    let h = f64::from_le_bytes(read_exact(&mut r, "spacing")?);
    let scale = f64::from_le_bytes(read_exact(&mut r, "scale factor")?);
    let grid: Grid = match kind {
        0 => RadialGrid::from_spacing(h, dims[0] as usize).map_err(|e| Error::Format(e.to_string()))?.into(),
        _ => {
            if dims[0] != dims[1] || dims[1] != dims[2] {
                return Err(Error::Format(format!("non-cubic box dims {dims:?}")));
            }
            BoxGrid::from_spacing(h, dims[0] as usize, BoxBoundary::Dirichlet)
                .map_err(|e| Error::Format(e.to_string()))?
                .into()
        }
    };
    let mesh = Mesh::new(grid, scale).map_err(|e| Error::Format(e.to_string()))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * mesh.len() {
        return Err(Error::Format(format!("payload holds {} bytes, expected {}", bytes.len(), 8 * mesh.len())));
    }
    let values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect();
    Field::on_mesh(mesh, values).map_err(|e| Error::Format(e.to_string()))
}

pub fn save_field(u: &Field, path: impl AsRef<std::path::Path>) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_field(u, std::io::BufWriter::new(f))
}

pub fn load_field(path: impl AsRef<std::path::Path>) -> Result<Field> {
    let f = std::fs::File::open(path)?;
    read_field(std::io::BufReader::new(f))
}
