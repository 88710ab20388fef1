//! Reader and bit-exact writer for the `.npy` simple array container,
//! restricted to version 1.0, C order, little-endian `f4`/`f8`/`u1`/`u2`.

use crate::error::FormatError;

pub const MAGIC: &[u8; 6] = b"\x93NUMPY";

const PREAMBLE_LEN: usize = 10;
const ALIGN: usize = 64;
/// Spare header room numpy reserves so the leading axis can grow in place.
const GROWTH_AXIS_MAX_DIGITS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dtype {
    F32,
    F64,
    U8,
    U16,
}

impl Dtype {
    pub fn descr(self) -> &'static str {
        match self {
            Dtype::F32 => "<f4",
            Dtype::F64 => "<f8",
            Dtype::U8 => "|u1",
            Dtype::U16 => "<u2",
        }
    }

    pub fn from_descr(descr: &str) -> Result<Self, FormatError> {
        match descr {
            "<f4" => Ok(Dtype::F32),
            "<f8" => Ok(Dtype::F64),
            "|u1" => Ok(Dtype::U8),
            "<u2" => Ok(Dtype::U16),
            other => Err(FormatError::UnsupportedDtype(other.to_string())),
        }
    }

    pub fn item_size(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 => 8,
            Dtype::U8 => 1,
            Dtype::U16 => 2,
        }
    }

    /// Largest representable value for integer dtypes.
    pub fn integer_max(self) -> Option<f64> {
        match self {
            Dtype::U8 => Some(u8::MAX as f64),
            Dtype::U16 => Some(u16::MAX as f64),
            Dtype::F32 | Dtype::F64 => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayHeader {
    pub dtype: Dtype,
    pub shape: Vec<usize>,
    /// Always true for arrays this module reads or writes.
    pub row_major: bool,
}

impl ArrayHeader {
    pub fn element_count(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn payload_len(&self) -> usize {
        self.element_count() * self.dtype.item_size()
    }
}

/// Decodes a container into its header and raw (unscaled) element values.
pub fn decode(bytes: &[u8]) -> Result<(ArrayHeader, Vec<f64>), FormatError> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(FormatError::BadMagic);
    }
    if bytes.len() < PREAMBLE_LEN {
        return Err(FormatError::Truncated {
            expected: PREAMBLE_LEN,
            found: bytes.len(),
        });
    }
    let (major, minor) = (bytes[6], bytes[7]);
    if (major, minor) != (1, 0) {
        return Err(FormatError::UnsupportedVersion { major, minor });
    }
    let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    let data_start = PREAMBLE_LEN + header_len;
    if bytes.len() < data_start {
        return Err(FormatError::Truncated {
            expected: data_start,
            found: bytes.len(),
        });
    }
    let text = std::str::from_utf8(&bytes[PREAMBLE_LEN..data_start])
        .map_err(|_| FormatError::BadHeader("header is not ASCII".into()))?;
    let header = parse_header_dict(text)?;

    let payload = &bytes[data_start..];
    let expected = header.payload_len();
    if payload.len() < expected {
        return Err(FormatError::Truncated {
            expected,
            found: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(FormatError::TrailingBytes {
            extra: payload.len() - expected,
        });
    }

    let values = match header.dtype {
        Dtype::F32 => payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect(),
        Dtype::F64 => payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect(),
        Dtype::U8 => payload.iter().map(|&b| b as f64).collect(),
        Dtype::U16 => payload
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]) as f64)
            .collect(),
    };
    Ok((header, values))
}

/// Encodes raw element values. Integer dtypes expect values already
/// quantized to the dtype's range.
pub fn encode(header: &ArrayHeader, values: &[f64]) -> Vec<u8> {
    debug_assert_eq!(header.element_count(), values.len());
    let mut dict = format!(
        "{{'descr': '{}', 'fortran_order': False, 'shape': {}, }}",
        header.dtype.descr(),
        shape_literal(&header.shape)
    );
    if let Some(lead) = header.shape.first() {
        let digits = lead.to_string().len();
        dict.push_str(&" ".repeat(GROWTH_AXIS_MAX_DIGITS.saturating_sub(digits)));
    }
    let pad = ALIGN - (PREAMBLE_LEN + dict.len() + 1) % ALIGN;
    dict.push_str(&" ".repeat(pad % ALIGN));
    dict.push('\n');

    let mut out = Vec::with_capacity(PREAMBLE_LEN + dict.len() + header.payload_len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(dict.len() as u16).to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    for &v in values {
        match header.dtype {
            Dtype::F32 => out.extend_from_slice(&(v as f32).to_le_bytes()),
            Dtype::F64 => out.extend_from_slice(&v.to_le_bytes()),
            Dtype::U8 => out.push(v as u8),
            Dtype::U16 => out.extend_from_slice(&(v as u16).to_le_bytes()),
        }
    }
    out
}

fn shape_literal(shape: &[usize]) -> String {
    match shape {
        [n] => format!("({n},)"),
        _ => format!(
            "({})",
            shape
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

#[derive(Debug, PartialEq)]
enum Literal {
    Str(String),
    Bool(bool),
    Tuple(Vec<usize>),
}

/// Parses the Python dict literal subset numpy emits.
fn parse_header_dict(text: &str) -> Result<ArrayHeader, FormatError> {
    let bad = |msg: &str| FormatError::BadHeader(msg.to_string());
    let body = text
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| bad("header is not a dict literal"))?;

    let mut cursor = Cursor::new(body);
    let mut descr = None;
    let mut fortran = None;
    let mut shape = None;
    loop {
        cursor.skip_ws();
        if cursor.at_end() {
            break;
        }
        let key = match cursor.literal()? {
            Literal::Str(k) => k,
            _ => return Err(bad("dict key is not a string")),
        };
        cursor.skip_ws();
        cursor.expect(':')?;
        cursor.skip_ws();
        let value = cursor.literal()?;
        match (key.as_str(), value) {
            ("descr", Literal::Str(s)) => descr = Some(s),
            ("fortran_order", Literal::Bool(b)) => fortran = Some(b),
            ("shape", Literal::Tuple(t)) => shape = Some(t),
            (k @ ("descr" | "fortran_order" | "shape"), _) => {
                return Err(FormatError::BadHeader(format!("wrong type for `{k}`")))
            }
            (k, _) => return Err(FormatError::BadHeader(format!("unexpected key `{k}`"))),
        }
        cursor.skip_ws();
        if !cursor.eat(',') {
            cursor.skip_ws();
            if !cursor.at_end() {
                return Err(bad("expected `,` between entries"));
            }
        }
    }

    let descr = descr.ok_or_else(|| bad("missing `descr`"))?;
    let fortran = fortran.ok_or_else(|| bad("missing `fortran_order`"))?;
    let shape = shape.ok_or_else(|| bad("missing `shape`"))?;
    let dtype = Dtype::from_descr(&descr)?;
    if fortran {
        return Err(FormatError::FortranOrder);
    }
    if shape.is_empty() || shape.len() > 3 {
        return Err(FormatError::TooManyDims(shape.len()));
    }
    if shape.contains(&0) {
        return Err(bad("zero-length axis"));
    }
    Ok(ArrayHeader {
        dtype,
        shape,
        row_major: true,
    })
}

struct Cursor<'a> {
    rest: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Self { rest: text }
    }

    fn at_end(&self) -> bool {
        self.rest.is_empty()
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn eat(&mut self, c: char) -> bool {
        if let Some(r) = self.rest.strip_prefix(c) {
            self.rest = r;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), FormatError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(FormatError::BadHeader(format!("expected `{c}`")))
        }
    }

    fn literal(&mut self) -> Result<Literal, FormatError> {
        let bad = |msg: &str| FormatError::BadHeader(msg.to_string());
        if let Some(quote) = self.rest.chars().next().filter(|c| *c == '\'' || *c == '"') {
            let inner = &self.rest[1..];
            let end = inner
                .find(quote)
                .ok_or_else(|| bad("unterminated string"))?;
            let s = inner[..end].to_string();
            self.rest = &inner[end + 1..];
            return Ok(Literal::Str(s));
        }
        for (word, value) in [("True", true), ("False", false)] {
            if let Some(r) = self.rest.strip_prefix(word) {
                self.rest = r;
                return Ok(Literal::Bool(value));
            }
        }
        if self.eat('(') {
            let mut items = Vec::new();
            loop {
                self.skip_ws();
                if self.eat(')') {
                    break;
                }
                let digits = self
                    .rest
                    .find(|c: char| !c.is_ascii_digit())
                    .unwrap_or(self.rest.len());
                if digits == 0 {
                    return Err(bad("shape entries must be non-negative integers"));
                }
                let n = self.rest[..digits]
                    .parse()
                    .map_err(|_| bad("shape entry out of range"))?;
                items.push(n);
                self.rest = &self.rest[digits..];
                self.skip_ws();
                if !self.eat(',') {
                    self.skip_ws();
                    self.expect(')')?;
                    break;
                }
            }
            return Ok(Literal::Tuple(items));
        }
        Err(bad("unsupported literal"))
    }
}
