use std::fs;

use binmat::matroid::parse_element_list;
use binmat::{named_matroid, Error, GroundSet, Matroid, Result, Space};

/// Resolves a state argument: `full`, `empty`, `file=PATH`, `elements=1,2,3`,
/// `hex=7f` or `name=F_7`.
pub fn parse_state(space: Space, arg: &str) -> Result<Matroid> {
    match arg {
        "full" => return Ok(Matroid::full(space)),
        "empty" => return Ok(Matroid::empty(space)),
        _ => {}
    }
    let (key, value) = arg
        .split_once('=')
        .ok_or_else(|| Error::domain(format!("cannot read state `{arg}`")))?;
    match key {
        "file" => {
            let text = fs::read_to_string(value)
                .map_err(|e| Error::domain(format!("cannot read {value}: {e}")))?;
            let m = Matroid::parse(&text)?;
            if m.space() != space {
                return Err(Error::SpaceMismatch {
                    left: space.rank(),
                    right: m.space().rank(),
                });
            }
            Ok(m)
        }
        "elements" => parse_element_list(space, value).map(Matroid::new),
        "hex" => GroundSet::from_hex(space, value).map(Matroid::new),
        "name" => named_matroid(space, value),
        other => Err(Error::domain(format!(
            "unknown state kind `{other}` (use full, empty, file=, elements=, hex= or name=)"
        ))),
    }
}

/// Metadata carried in `#` comments of a move file.
#[derive(Default)]
pub struct MoveFileHeader {
    pub r: Option<u32>,
    pub start: Option<String>,
    pub target: Option<String>,
}

pub fn read_header(text: &str) -> Result<MoveFileHeader> {
    let mut header = MoveFileHeader::default();
    for (i, line) in text.lines().enumerate() {
        let Some(comment) = line.trim().strip_prefix('#') else {
            continue;
        };
        let Some((key, value)) = comment.trim().split_once('=') else {
            continue;
        };
        let value = value.trim().to_string();
        match key.trim() {
            "r" => {
                let r = value
                    .parse()
                    .map_err(|_| Error::parse(i + 1, format!("invalid rank `{value}`")))?;
                header.r = Some(r);
            }
            "start" => header.start = Some(value),
            "target" => header.target = Some(value),
            _ => {}
        }
    }
    Ok(header)
}
