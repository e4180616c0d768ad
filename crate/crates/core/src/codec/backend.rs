//! General-purpose compressors applied to the serialized sections.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Upper bound on the size of any decompressed payload.
pub const MAX_DECOMPRESSED: u64 = 1 << 30;

const LZMA_MEM_LIMIT_KB: u32 = 256 * 1024;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Backend {
    Store,
    Deflate,
    #[default]
    Lzma,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Store, Backend::Deflate, Backend::Lzma];

    pub fn id(self) -> u8 {
        match self {
            Backend::Store => 0,
            Backend::Deflate => 1,
            Backend::Lzma => 2,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            0 => Ok(Backend::Store),
            1 => Ok(Backend::Deflate),
            2 => Ok(Backend::Lzma),
            other => Err(Error::UnknownBackend(other)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Store => "store",
            Backend::Deflate => "deflate",
            Backend::Lzma => "lzma",
        }
    }

    pub fn compress(self, data: &[u8]) -> Vec<u8> {
        match self {
            Backend::Store => data.to_vec(),
            Backend::Deflate => {
                let mut enc = flate2::write::DeflateEncoder::new(Vec::new(), flate2::Compression::best());
                enc.write_all(data).expect("writing to a Vec cannot fail");
                enc.finish().expect("writing to a Vec cannot fail")
            }
            Backend::Lzma => {
                let mut opts = lzma_rust2::LzmaOptions::with_preset(6);
                // a smaller window changes nothing for inputs that fit and keeps decoder memory low
                opts.dict_size = opts.dict_size.min(dict_size_for(data.len() as u64));
                let mut w = lzma_rust2::LzmaWriter::new_use_header(Vec::new(), &opts, Some(data.len() as u64))
                    .expect("valid preset");
                w.write_all(data).expect("writing to a Vec cannot fail");
                w.finish().expect("writing to a Vec cannot fail")
            }
        }
    }

    pub fn decompress(self, data: &[u8]) -> Result<Vec<u8>> {
        match self {
            Backend::Store => Ok(data.to_vec()),
            Backend::Deflate => {
                let mut out = Vec::new();
                flate2::read::DeflateDecoder::new(data)
                    .take(MAX_DECOMPRESSED + 1)
                    .read_to_end(&mut out)
                    .map_err(|e| Error::Backend(e.to_string()))?;
                if out.len() as u64 > MAX_DECOMPRESSED {
                    return Err(Error::Backend("decompressed size limit exceeded".into()));
                }
                Ok(out)
            }
            Backend::Lzma => {
                // .lzma header: props (1), dictionary size (4), unpacked size (8)
                if data.len() < 13 {
                    return Err(Error::Truncated("lzma header"));
                }
                let size = u64::from_le_bytes(data[5..13].try_into().expect("8 bytes"));
                if size > MAX_DECOMPRESSED {
                    return Err(Error::Backend(format!("declared size {size} exceeds limit")));
                }
                let dict = u32::from_le_bytes(data[1..5].try_into().expect("4 bytes")) as u64;
                if dict > dict_size_for(size) as u64 {
                    return Err(Error::Backend(format!("dictionary size {dict} too large for {size} bytes")));
                }
                let mut r = lzma_rust2::LzmaReader::new_mem_limit(data, LZMA_MEM_LIMIT_KB, None)
                    .map_err(|e| Error::Backend(e.to_string()))?;
                let mut out = Vec::with_capacity((size as usize).min(64 * data.len()));
                r.read_to_end(&mut out).map_err(|e| Error::Backend(e.to_string()))?;
                if out.len() as u64 != size {
                    return Err(Error::Backend("unpacked size mismatch".into()));
                }
                Ok(out)
            }
        }
    }
}

/// Smallest power-of-two window covering `len` bytes.
fn dict_size_for(len: u64) -> u32 {
    let len = u32::try_from(len).unwrap_or(u32::MAX).max(lzma_rust2::DICT_SIZE_MIN);
    len.checked_next_power_of_two().unwrap_or(1 << 31)
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "store" => Ok(Backend::Store),
            "deflate" => Ok(Backend::Deflate),
            "lzma" => Ok(Backend::Lzma),
            other => Err(Error::Parameter(format!("unknown backend {other:?}"))),
        }
    }
}
