//! Self-delimiting record framing and the varint payload codec.

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub fn put_varint(out: &mut Vec<u8>, mut x: u64) {
    while x >= 0x80 {
        out.push((x as u8) | 0x80);
        x >>= 7;
    }
    out.push(x as u8);
}

pub fn varint_len(mut x: u64) -> usize {
    let mut n = 1;
    while x >= 0x80 {
        x >>= 7;
        n += 1;
    }
    n
}

/// Cursor over an encoded payload.
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Reader<'a> {
        Reader { buf, pos: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.pos >= self.buf.len()
    }

    pub fn varint(&mut self) -> Result<u64> {
        let mut x = 0u64;
        let mut shift = 0;
        loop {
            let byte = *self
                .buf
                .get(self.pos)
                .ok_or_else(|| Error::Corrupt("truncated varint".into()))?;
            self.pos += 1;
            if shift >= 64 {
                return Err(Error::Corrupt("varint overflow".into()));
            }
            x |= u64::from(byte & 0x7f) << shift;
            if byte & 0x80 == 0 {
                return Ok(x);
            }
            shift += 7;
        }
    }

    pub fn byte(&mut self) -> Result<u8> {
        let b = *self
            .buf
            .get(self.pos)
            .ok_or_else(|| Error::Corrupt("truncated payload".into()))?;
        self.pos += 1;
        Ok(b)
    }

    pub fn bytes(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Corrupt("truncated payload".into()))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }
}

/// Size of one framed record on the wire: `varint(|k|) k varint(|v|) v`.
pub fn frame_len(key: &[u8], value: &[u8]) -> usize {
    varint_len(key.len() as u64) + key.len() + varint_len(value.len() as u64) + value.len()
}

#[derive(Clone, Copy, Debug)]
struct Span {
    start: usize,
    klen: u32,
    vlen: u32,
}

/// Compact in-memory batch of key/value records.
#[derive(Clone, Debug, Default)]
pub struct RecordBuf {
    data: Vec<u8>,
    spans: Vec<Span>,
}

impl RecordBuf {
    pub fn new() -> RecordBuf {
        RecordBuf::default()
    }

    pub fn push(&mut self, key: &[u8], value: &[u8]) {
        let start = self.data.len();
        self.data.extend_from_slice(key);
        self.data.extend_from_slice(value);
        self.spans.push(Span {
            start,
            klen: key.len() as u32,
            vlen: value.len() as u32,
        });
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn data_bytes(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn key(&self, i: usize) -> &[u8] {
        let s = self.spans[i];
        &self.data[s.start..s.start + s.klen as usize]
    }

    #[inline]
    pub fn get(&self, i: usize) -> (&[u8], &[u8]) {
        let s = self.spans[i];
        let k = s.start + s.klen as usize;
        (&self.data[s.start..k], &self.data[k..k + s.vlen as usize])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8], &[u8])> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn clear(&mut self) {
        self.data.clear();
        self.spans.clear();
    }

    pub fn write_framed<W: Write>(&self, w: &mut W) -> Result<()> {
        let mut head = Vec::with_capacity(20);
        for (k, v) in self.iter() {
            head.clear();
            put_varint(&mut head, k.len() as u64);
            w.write_all(&head)?;
            w.write_all(k)?;
            head.clear();
            put_varint(&mut head, v.len() as u64);
            w.write_all(&head)?;
            w.write_all(v)?;
        }
        Ok(())
    }

    pub fn read_framed<R: Read>(mut r: R) -> Result<RecordBuf> {
        let mut raw = Vec::new();
        r.read_to_end(&mut raw)?;
        RecordBuf::decode_framed(&raw)
    }

    pub fn decode_framed(raw: &[u8]) -> Result<RecordBuf> {
        let mut out = RecordBuf::new();
        let mut rd = Reader::new(raw);
        while !rd.is_empty() {
            let kl = rd.varint()? as usize;
            let k = rd.bytes(kl)?;
            let vl = rd.varint()? as usize;
            let v = rd.bytes(vl)?;
            out.push(k, v);
        }
        Ok(out)
    }
}
