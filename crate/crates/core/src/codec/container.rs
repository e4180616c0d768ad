//! Byte layout of the codec container.
//!
//! ```text
//! "BDZ1" | backend id | flags | n | |V| | root layer | #long tree edges | #forward edges
//! backend( tree bits | long flags | long lengths | sh | forward flags | forward lengths | tail )
//! ```
//!
//! Header integers and every stream value are varints. Bit sections are
//! packed most significant bit first and padded with zeros to a whole byte.
//! Lengths are stored minus two. The tail is zigzag coded when delta coding
//! is on. A single-terminal diagram has no payload at all.

use super::varint::{write_varint, write_zigzag, ByteReader};
use super::{Backend, EncodedStreams};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"BDZ1";

const FLAG_TERMINAL_ORDER: u8 = 1;
const FLAG_DELTA: u8 = 1 << 1;
const FLAG_SINGLE_ONE: u8 = 1 << 2;

pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| chunk.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i))))
        .collect()
}

/// Unpacks `count` bits; padding bits must be zero.
pub fn unpack_bits(bytes: &[u8], count: usize) -> Result<Vec<bool>> {
    if bytes.len() != count.div_ceil(8) {
        return Err(Error::inconsistent("bit section has the wrong byte length"));
    }
    let bits: Vec<bool> = (0..bytes.len() * 8).map(|i| bytes[i / 8] >> (7 - i % 8) & 1 == 1).collect();
    if bits[count..].iter().any(|&b| b) {
        return Err(Error::inconsistent("nonzero padding bits"));
    }
    Ok(bits[..count].to_vec())
}

pub(super) fn write(s: &EncodedStreams) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(s.backend.id());
    let mut flags = 0;
    if s.terminal_order {
        flags |= FLAG_TERMINAL_ORDER;
    }
    if s.delta_enabled {
        flags |= FLAG_DELTA;
    }
    if s.node_count == 1 && s.single_terminal {
        flags |= FLAG_SINGLE_ONE;
    }
    out.push(flags);
    write_varint(&mut out, s.num_vars as u64);
    write_varint(&mut out, s.node_count as u64);
    write_varint(&mut out, s.root_layer as u64);
    write_varint(&mut out, s.long_tree_lengths.len() as u64);
    write_varint(&mut out, s.forward_lengths.len() as u64);
    if s.node_count == 1 {
        return out;
    }

    let mut payload = pack_bits(&s.tree_bits);
    if !s.long_tree_lengths.is_empty() {
        payload.extend(pack_bits(&s.long_tree_marks));
        for &len in &s.long_tree_lengths {
            write_varint(&mut payload, len as u64 - 2);
        }
    }
    for &v in &s.sh {
        write_varint(&mut payload, v as u64);
    }
    if !s.forward_lengths.is_empty() {
        payload.extend(pack_bits(&s.forward_marks));
        for &len in &s.forward_lengths {
            write_varint(&mut payload, len as u64 - 2);
        }
    }
    for &v in &s.tail {
        if s.delta_enabled {
            write_zigzag(&mut payload, v);
        } else {
            write_varint(&mut payload, v as u64);
        }
    }
    out.extend(s.backend.compress(&payload));
    out
}

fn read_u32(r: &mut ByteReader<'_>, what: &'static str) -> Result<u32> {
    let v = r.read_varint(what)?;
    u32::try_from(v).map_err(|_| Error::inconsistent(format!("{what} {v} out of range")))
}

fn read_length(r: &mut ByteReader<'_>, what: &'static str) -> Result<u32> {
    let v = r.read_varint(what)?;
    v.checked_add(2)
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| Error::inconsistent(format!("{what} out of range")))
}

pub(super) fn read(bytes: &[u8]) -> Result<EncodedStreams> {
    let mut r = ByteReader::new(bytes);
    if r.read_bytes(4, "magic").ok() != Some(&MAGIC[..]) {
        return Err(Error::BadMagic);
    }
    let backend = Backend::from_id(r.read_u8("backend id")?)?;
    let flags = r.read_u8("flags")?;
    if flags & !(FLAG_TERMINAL_ORDER | FLAG_DELTA | FLAG_SINGLE_ONE) != 0 {
        return Err(Error::inconsistent(format!("unknown flag bits {flags:#04x}")));
    }
    let num_vars = read_u32(&mut r, "variable count")?;
    if num_vars == 0 || num_vars == u32::MAX {
        return Err(Error::inconsistent(format!("variable count {num_vars} out of range")));
    }
    let node_count = r.read_varint("node count")?;
    let root_layer = read_u32(&mut r, "root layer")?;
    let long_count = r.read_varint("long edge count")?;
    let forward_count = r.read_varint("forward edge count")?;

    let mut s = EncodedStreams {
        backend,
        num_vars,
        node_count: 0,
        root_layer,
        terminal_order: flags & FLAG_TERMINAL_ORDER != 0,
        delta_enabled: flags & FLAG_DELTA != 0,
        single_terminal: flags & FLAG_SINGLE_ONE != 0,
        tree_bits: Vec::new(),
        long_tree_marks: Vec::new(),
        long_tree_lengths: Vec::new(),
        sh: Vec::new(),
        forward_marks: Vec::new(),
        forward_lengths: Vec::new(),
        tail: Vec::new(),
    };

    if node_count == 1 {
        if long_count != 0 || forward_count != 0 || s.terminal_order || r.remaining() != 0 {
            return Err(Error::inconsistent("single-terminal container carries extra data"));
        }
        s.node_count = 1;
        return Ok(s);
    }
    if node_count < 3 {
        return Err(Error::inconsistent(format!("node count {node_count} is not representable")));
    }
    if s.single_terminal {
        return Err(Error::inconsistent("single-terminal flag on a multi-node diagram"));
    }

    let payload = backend.decompress(r.rest())?;
    let mut p = ByteReader::new(&payload);
    // every node costs at least two tree bits, so this bounds all allocations below
    if node_count > (p.remaining() as u64) * 4 {
        return Err(Error::Truncated("tree bits"));
    }
    let count = node_count as usize;
    if long_count > node_count || forward_count > node_count {
        return Err(Error::inconsistent("edge counts exceed node count"));
    }
    s.node_count = count;

    s.tree_bits = unpack_bits(p.read_bytes((2 * count).div_ceil(8), "tree bits")?, 2 * count)?;
    if long_count > 0 {
        s.long_tree_marks = unpack_bits(p.read_bytes(count.div_ceil(8), "long edge flags")?, count)?;
        let flagged = s.long_tree_marks.iter().filter(|&&b| b).count() as u64;
        if flagged != long_count {
            return Err(Error::inconsistent("long edge flags disagree with header count"));
        }
        for _ in 0..long_count {
            s.long_tree_lengths.push(read_length(&mut p, "long edge length")?);
        }
    }
    let sh_len = count - 3;
    if sh_len > p.remaining() {
        return Err(Error::Truncated("sh stream"));
    }
    s.sh.reserve(sh_len);
    for _ in 0..sh_len {
        s.sh.push(read_u32(&mut p, "sh value")?);
    }
    let zeros = s.sh.iter().filter(|&&v| v == 0).count();
    if forward_count > zeros as u64 {
        return Err(Error::inconsistent("more forward edges than deferred edges"));
    }
    if forward_count > 0 {
        s.forward_marks = unpack_bits(p.read_bytes(zeros.div_ceil(8), "forward flags")?, zeros)?;
        let flagged = s.forward_marks.iter().filter(|&&b| b).count() as u64;
        if flagged != forward_count {
            return Err(Error::inconsistent("forward flags disagree with header count"));
        }
        for _ in 0..forward_count {
            s.forward_lengths.push(read_length(&mut p, "forward edge length")?);
        }
    }
    let tail_len = zeros - forward_count as usize;
    if tail_len > p.remaining() {
        return Err(Error::Truncated("tail stream"));
    }
    s.tail.reserve(tail_len);
    for _ in 0..tail_len {
        let v = if s.delta_enabled {
            p.read_zigzag("tail value")?
        } else {
            i64::try_from(p.read_varint("tail value")?).map_err(|_| Error::inconsistent("tail value out of range"))?
        };
        s.tail.push(v);
    }
    if p.remaining() != 0 {
        return Err(Error::inconsistent(format!("{} trailing payload bytes", p.remaining())));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_packing() {
        let bits: Vec<bool> = "1101000001".chars().map(|c| c == '1').collect();
        let packed = pack_bits(&bits);
        assert_eq!(packed, vec![0b1101_0000, 0b0100_0000]);
        assert_eq!(unpack_bits(&packed, 10).unwrap(), bits);
        assert!(unpack_bits(&[0b1101_0000, 0b0110_0000], 10).is_err());
        assert!(unpack_bits(&packed, 17).is_err());
        assert!(pack_bits(&[]).is_empty());
    }

    #[test]
    fn bad_magic() {
        assert!(matches!(read(b"BDN1\x00\x00"), Err(Error::BadMagic)));
        assert!(matches!(read(b"BD"), Err(Error::BadMagic)));
    }
}
