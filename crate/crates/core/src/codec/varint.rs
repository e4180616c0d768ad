//! LEB128-style integers: little-endian base-128 groups, high bit set on
//! every byte except the last.

use crate::error::{Error, Result};

pub fn write_varint(out: &mut Vec<u8>, mut value: u64) {
    while value >= 0x80 {
        out.push((value as u8 & 0x7f) | 0x80);
        value >>= 7;
    }
    out.push(value as u8);
}

#[inline]
pub fn zigzag(value: i64) -> u64 {
    ((value << 1) ^ (value >> 63)) as u64
}

#[inline]
pub fn unzigzag(value: u64) -> i64 {
    ((value >> 1) as i64) ^ -((value & 1) as i64)
}

pub fn write_zigzag(out: &mut Vec<u8>, value: i64) {
    write_varint(out, zigzag(value));
}

/// Cursor over a byte slice that names what it was reading when it runs dry.
#[derive(Clone, Debug)]
pub struct ByteReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        ByteReader { buf, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn rest(&self) -> &'a [u8] {
        &self.buf[self.pos..]
    }

    pub fn read_u8(&mut self, what: &'static str) -> Result<u8> {
        let b = *self.buf.get(self.pos).ok_or(Error::Truncated(what))?;
        self.pos += 1;
        Ok(b)
    }

    pub fn read_bytes(&mut self, len: usize, what: &'static str) -> Result<&'a [u8]> {
        if self.remaining() < len {
            return Err(Error::Truncated(what));
        }
        let s = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    /// Rejects encodings longer than ten bytes, values past `u64::MAX`, and
    /// redundant trailing zero groups.
    pub fn read_varint(&mut self, what: &'static str) -> Result<u64> {
        let mut value = 0u64;
        for i in 0..10 {
            let b = self.read_u8(what)?;
            let group = (b & 0x7f) as u64;
            if i == 9 && b > 1 {
                return Err(Error::OverlongVarint);
            }
            value |= group << (7 * i);
            if b & 0x80 == 0 {
                if b == 0 && i > 0 {
                    return Err(Error::OverlongVarint);
                }
                return Ok(value);
            }
        }
        Err(Error::OverlongVarint)
    }

    pub fn read_zigzag(&mut self, what: &'static str) -> Result<i64> {
        self.read_varint(what).map(unzigzag)
    }
}

pub fn read_varint(buf: &[u8]) -> Result<(u64, usize)> {
    let mut r = ByteReader::new(buf);
    let v = r.read_varint("varint")?;
    Ok((v, r.position()))
}

pub fn read_zigzag(buf: &[u8]) -> Result<(i64, usize)> {
    let (v, n) = read_varint(buf)?;
    Ok((unzigzag(v), n))
}
