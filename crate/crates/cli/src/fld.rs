//! FLD1 snapshot format.
//!
//! 32-byte header, then little-endian row-major float64 physical values,
//! component-major:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "FLD1"
//!      4     4  u32 nx
//!      8     4  u32 ny
//!     12     4  u32 ncomponents
//!     16     4  u32 dtype (1 = float64, little-endian)
//!     20     4  padding (zero)
//!     24     8  u64 reserved (zero)
//! ```

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use ovlab_core::spectral::{Grid, PhysicalField};

use crate::{CliError, Result};

pub const MAGIC: &[u8; 4] = b"FLD1";
pub const DTYPE_F64: u32 = 1;
pub const HEADER_LEN: usize = 32;

pub fn write_field(path: &Path, field: &PhysicalField) -> Result<()> {
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))?;
    let mut w = std::io::BufWriter::new(file);
    w.write_all(MAGIC)?;
    w.write_u32::<LittleEndian>(field.nx() as u32)?;
    w.write_u32::<LittleEndian>(field.ny() as u32)?;
    w.write_u32::<LittleEndian>(field.ncomp() as u32)?;
    w.write_u32::<LittleEndian>(DTYPE_F64)?;
    w.write_u32::<LittleEndian>(0)?;
    w.write_u64::<LittleEndian>(0)?;
    for v in field.data() {
        w.write_f64::<LittleEndian>(*v)?;
    }
    w.flush()?;
    Ok(())
}

pub struct RawField {
    pub nx: usize,
    pub ny: usize,
    pub ncomp: usize,
    /// Component-major, row-major within a component, x fastest.
    pub values: Vec<f64>,
}

impl RawField {
    pub fn into_physical(self, grid: &Grid) -> Result<PhysicalField> {
        if grid.nx() != self.nx || grid.ny() != self.ny {
            return Err(CliError::config("snapshot grid does not match"));
        }
        let mut phys = PhysicalField::zeros(grid.clone(), self.ncomp);
        let n = grid.len();
        for c in 0..self.ncomp {
            phys.comp_mut(c).copy_from_slice(&self.values[c * n..(c + 1) * n]);
        }
        Ok(phys)
    }
}

pub fn read_field(path: &Path) -> Result<RawField> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::io(format!("cannot open {}: {e}", path.display())))?;
    let mut r = std::io::BufReader::new(file);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CliError::io(format!(
            "{}: not an FLD1 file",
            path.display()
        )));
    }
    let nx = r.read_u32::<LittleEndian>()? as usize;
    let ny = r.read_u32::<LittleEndian>()? as usize;
    let ncomp = r.read_u32::<LittleEndian>()? as usize;
    let dtype = r.read_u32::<LittleEndian>()?;
    if dtype != DTYPE_F64 {
        return Err(CliError::io(format!("unsupported dtype {dtype}")));
    }
    let _pad = r.read_u32::<LittleEndian>()?;
    let _reserved = r.read_u64::<LittleEndian>()?;
    let count = nx * ny * ncomp;
    let mut values = vec![0.0f64; count];
    for v in &mut values {
        *v = r.read_f64::<LittleEndian>()?;
    }
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(CliError::io(format!(
            "{}: trailing bytes after field data",
            path.display()
        )));
    }
    Ok(RawField {
        nx,
        ny,
        ncomp,
        values,
    })
}
