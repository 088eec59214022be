//! Common Log Format line parser.
//!
//! Accepts `host ident authuser [dd/Mon/yyyy:HH:MM:SS zone] "METHOD path PROTO" status bytes`
//! with single-space separators. The request may omit the protocol and the
//! bytes field may be `-`. Timestamps are converted to UTC epoch seconds using
//! the zone offset carried on the line.

use std::borrow::Cow;
use std::io::BufRead;

use super::TraceError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogRecord {
    pub host: String,
    /// Seconds since the Unix epoch, UTC.
    pub timestamp: i64,
    pub method: String,
    pub path: String,
    pub protocol: Option<String>,
    pub status: u16,
    pub bytes: Option<u64>,
}

/// A line that is not valid Common Log Format. `offset` is the byte index of
/// the first violation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed log line at byte {offset}: {reason}")]
pub struct MalformedLine {
    pub offset: usize,
    pub reason: &'static str,
}

const MONTHS: [&[u8; 3]; 12] = [
    b"Jan", b"Feb", b"Mar", b"Apr", b"May", b"Jun", b"Jul", b"Aug", b"Sep", b"Oct", b"Nov", b"Dec",
];

fn is_space(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn fail(&self, reason: &'static str) -> MalformedLine {
        MalformedLine {
            offset: self.pos,
            reason,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.buf.get(self.pos).copied()
    }

    fn expect(&mut self, byte: u8, reason: &'static str) -> Result<(), MalformedLine> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.fail(reason))
        }
    }

    /// Non-empty run of non-whitespace bytes.
    fn token(&mut self, reason: &'static str) -> Result<&'a [u8], MalformedLine> {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if is_space(b) {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.fail(reason));
        }
        Ok(&self.buf[start..self.pos])
    }

    fn digits(&mut self, count: usize, reason: &'static str) -> Result<u32, MalformedLine> {
        let mut value = 0u32;
        for _ in 0..count {
            match self.peek() {
                Some(b @ b'0'..=b'9') => {
                    value = value * 10 + u32::from(b - b'0');
                    self.pos += 1;
                }
                _ => return Err(self.fail(reason)),
            }
        }
        Ok(value)
    }
}

fn text(bytes: &[u8]) -> String {
    match String::from_utf8_lossy(bytes) {
        Cow::Borrowed(s) => s.to_owned(),
        Cow::Owned(s) => s,
    }
}

fn days_in_month(year: i64, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        _ if (year % 4 == 0 && year % 100 != 0) || year % 400 == 0 => 29,
        _ => 28,
    }
}

/// Days since 1970-01-01 for a proleptic Gregorian date.
fn days_from_civil(year: i64, month: u32, day: u32) -> i64 {
    let y = if month <= 2 { year - 1 } else { year };
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let m = i64::from(month);
    let doy = (153 * (if m > 2 { m - 3 } else { m + 9 }) + 2) / 5 + i64::from(day) - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

fn parse_timestamp(cur: &mut Cursor<'_>) -> Result<i64, MalformedLine> {
    let day_pos = cur.pos;
    let day = cur.digits(2, "day must be two digits")?;
    cur.expect(b'/', "expected '/' after day")?;
    let month_pos = cur.pos;
    let month = cur
        .buf
        .get(cur.pos..cur.pos + 3)
        .and_then(|m| MONTHS.iter().position(|name| &name[..] == m))
        .ok_or_else(|| cur.fail("unknown month"))? as u32
        + 1;
    cur.pos += 3;
    cur.expect(b'/', "expected '/' after month")?;
    let year = i64::from(cur.digits(4, "year must be four digits")?);
    cur.expect(b':', "expected ':' after year")?;
    let hour_pos = cur.pos;
    let hour = cur.digits(2, "hour must be two digits")?;
    cur.expect(b':', "expected ':' after hour")?;
    let minute = cur.digits(2, "minute must be two digits")?;
    cur.expect(b':', "expected ':' after minute")?;
    let second = cur.digits(2, "second must be two digits")?;
    cur.expect(b' ', "expected space before zone")?;
    let sign = match cur.peek() {
        Some(b'+') => 1,
        Some(b'-') => -1,
        _ => return Err(cur.fail("zone must start with '+' or '-'")),
    };
    cur.pos += 1;
    let zone_h = i64::from(cur.digits(2, "zone hours must be two digits")?);
    let zone_m = i64::from(cur.digits(2, "zone minutes must be two digits")?);

    if month == 0 || month > 12 {
        return Err(MalformedLine {
            offset: month_pos,
            reason: "unknown month",
        });
    }
    if day == 0 || day > days_in_month(year, month) {
        return Err(MalformedLine {
            offset: day_pos,
            reason: "day out of range",
        });
    }
    if hour > 23 || minute > 59 || second > 59 {
        return Err(MalformedLine {
            offset: hour_pos,
            reason: "time of day out of range",
        });
    }
    let local = days_from_civil(year, month, day) * 86_400
        + i64::from(hour) * 3600
        + i64::from(minute) * 60
        + i64::from(second);
    Ok(local - sign * (zone_h * 3600 + zone_m * 60))
}

struct Request {
    method: String,
    path: String,
    protocol: Option<String>,
}

fn parse_request(req: &[u8], base: usize) -> Result<Request, MalformedLine> {
    let fail = |at: usize, reason| MalformedLine {
        offset: base + at,
        reason,
    };
    let method_end = req
        .iter()
        .position(|&b| b == b' ')
        .ok_or_else(|| fail(req.len(), "request needs a method and a path"))?;
    if method_end == 0 || !req[..method_end].iter().all(u8::is_ascii_uppercase) {
        return Err(fail(0, "method must be uppercase letters"));
    }
    let rest = &req[method_end + 1..];
    match rest.first() {
        None => return Err(fail(method_end + 1, "empty path")),
        Some(&b) if is_space(b) => return Err(fail(method_end + 1, "path must not start with whitespace")),
        _ => {}
    }
    let (path, protocol) = match rest.iter().rposition(|&b| b == b' ') {
        Some(split)
            if split > 0
                && rest[split + 1..].starts_with(b"HTTP/")
                && rest.len() > split + 6
                && !rest[split + 1..].iter().any(|&b| is_space(b)) =>
        {
            (&rest[..split], Some(text(&rest[split + 1..])))
        }
        _ => (rest, None),
    };
    Ok(Request {
        method: text(&req[..method_end]),
        path: text(path),
        protocol,
    })
}

/// Parses one physical line (without its terminator). Never panics.
pub fn parse_clf_line(line: impl AsRef<[u8]>) -> Result<LogRecord, MalformedLine> {
    let buf = line.as_ref();
    let mut cur = Cursor { buf, pos: 0 };

    let host = cur.token("missing host")?;
    cur.expect(b' ', "expected space after host")?;
    cur.token("missing ident")?;
    cur.expect(b' ', "expected space after ident")?;
    cur.token("missing authuser")?;
    cur.expect(b' ', "expected space after authuser")?;
    cur.expect(b'[', "expected '[' opening the timestamp")?;
    let timestamp = parse_timestamp(&mut cur)?;
    cur.expect(b']', "expected ']' closing the timestamp")?;
    cur.expect(b' ', "expected space after timestamp")?;
    cur.expect(b'"', "expected '\"' opening the request")?;
    let req_start = cur.pos;
    let req_len = buf[req_start..]
        .iter()
        .position(|&b| b == b'"')
        .ok_or_else(|| cur.fail("unterminated request"))?;
    cur.pos = req_start + req_len + 1;
    cur.expect(b' ', "expected space after request")?;
    let status_pos = cur.pos;
    let status = cur.digits(3, "status must be three digits")?;
    if !(100..=599).contains(&status) {
        return Err(MalformedLine {
            offset: status_pos,
            reason: "status out of range",
        });
    }
    cur.expect(b' ', "expected space after status")?;
    let bytes = if cur.peek() == Some(b'-') {
        cur.pos += 1;
        None
    } else {
        let start = cur.pos;
        while matches!(cur.peek(), Some(b'0'..=b'9')) {
            cur.pos += 1;
        }
        if cur.pos == start {
            return Err(cur.fail("bytes must be digits or '-'"));
        }
        let digits = std::str::from_utf8(&buf[start..cur.pos]).unwrap_or_default();
        Some(digits.parse::<u64>().map_err(|_| MalformedLine {
            offset: start,
            reason: "bytes overflow",
        })?)
    };
    while let Some(b) = cur.peek() {
        if !is_space(b) {
            return Err(cur.fail("unexpected trailing data"));
        }
        cur.pos += 1;
    }

    let request = parse_request(&buf[req_start..req_start + req_len], req_start)?;
    Ok(LogRecord {
        host: text(host),
        timestamp,
        method: request.method,
        path: request.path,
        protocol: request.protocol,
        status: status as u16,
        bytes,
    })
}

/// Records parsed from a trace plus the number of lines that were skipped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadedTrace {
    pub records: Vec<LogRecord>,
    pub skipped: usize,
}

/// Reads every line of `source`, keeping parseable records in file order and
/// counting malformed lines instead of aborting.
pub fn load_trace<R: BufRead>(mut source: R) -> Result<LoadedTrace, TraceError> {
    let mut out = LoadedTrace::default();
    let mut line = Vec::with_capacity(256);
    loop {
        line.clear();
        if source.read_until(b'\n', &mut line)? == 0 {
            break;
        }
        let mut end = line.len();
        if end > 0 && line[end - 1] == b'\n' {
            end -= 1;
        }
        if end > 0 && line[end - 1] == b'\r' {
            end -= 1;
        }
        match parse_clf_line(&line[..end]) {
            Ok(record) => out.records.push(record),
            Err(_) => out.skipped += 1,
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nasa_line() {
        let rec = parse_clf_line(
            r#"in24.inetnebr.com - - [01/Aug/1995:00:00:01 -0400] "GET /shuttle/missions/sts-68/news/sts-68-mcc-05.txt HTTP/1.0" 200 1839"#,
        )
        .unwrap();
        assert_eq!(rec.host, "in24.inetnebr.com");
        assert_eq!(rec.status, 200);
        assert_eq!(rec.bytes, Some(1839));
        assert_eq!(rec.method, "GET");
        assert_eq!(rec.path, "/shuttle/missions/sts-68/news/sts-68-mcc-05.txt");
        assert_eq!(rec.protocol.as_deref(), Some("HTTP/1.0"));
        // 1995-08-01T04:00:01Z
        assert_eq!(rec.timestamp, 807_249_601);
    }

    #[test]
    fn dash_bytes_is_absent() {
        let rec = parse_clf_line(r#"host - - [01/Aug/1995:00:00:01 -0400] "GET / HTTP/1.0" 304 -"#).unwrap();
        assert_eq!(rec.status, 304);
        assert_eq!(rec.bytes, None);
    }

    #[test]
    fn request_without_protocol() {
        let rec = parse_clf_line(r#"h - - [01/Aug/1995:00:00:01 +0000] "GET /index.html" 200 10"#).unwrap();
        assert_eq!(rec.path, "/index.html");
        assert_eq!(rec.protocol, None);
    }

    #[test]
    fn garbage_is_malformed() {
        let err = parse_clf_line("garbage line without brackets").unwrap_err();
        assert_eq!(err.offset, 21);
        assert_eq!(err.reason, "expected '[' opening the timestamp");
    }

    #[test]
    fn reports_offset_of_bad_status() {
        let line = r#"h - - [01/Aug/1995:00:00:01 -0400] "GET / HTTP/1.0" 999 12"#;
        let err = parse_clf_line(line).unwrap_err();
        assert_eq!(err.offset, line.find("999").unwrap());
        assert_eq!(err.reason, "status out of range");
    }

    #[test]
    fn rejects_impossible_dates() {
        assert!(parse_clf_line(r#"h - - [31/Sep/1995:00:00:01 -0400] "GET / HTTP/1.0" 200 1"#).is_err());
        assert!(parse_clf_line(r#"h - - [29/Feb/1995:00:00:01 -0400] "GET / HTTP/1.0" 200 1"#).is_err());
        assert!(parse_clf_line(r#"h - - [29/Feb/1996:00:00:01 -0400] "GET / HTTP/1.0" 200 1"#).is_ok());
        assert!(parse_clf_line(r#"h - - [01/Foo/1995:00:00:01 -0400] "GET / HTTP/1.0" 200 1"#).is_err());
    }

    #[test]
    fn zone_offset_applied() {
        let a = parse_clf_line(r#"h - - [01/Aug/1995:00:00:00 -0400] "GET / HTTP/1.0" 200 1"#).unwrap();
        let b = parse_clf_line(r#"h - - [01/Aug/1995:04:00:00 +0000] "GET / HTTP/1.0" 200 1"#).unwrap();
        let c = parse_clf_line(r#"h - - [01/Aug/1995:05:30:00 +0130] "GET / HTTP/1.0" 200 1"#).unwrap();
        assert_eq!(a.timestamp, b.timestamp);
        assert_eq!(b.timestamp, c.timestamp);
    }

    #[test]
    fn empty_request_and_bad_bytes() {
        assert!(parse_clf_line(r#"h - - [01/Aug/1995:00:00:01 -0400] "" 400 -"#).is_err());
        assert!(parse_clf_line(r#"h - - [01/Aug/1995:00:00:01 -0400] "GET / HTTP/1.0" 200 12a"#).is_err());
        assert!(parse_clf_line(r#"h - - [01/Aug/1995:00:00:01 -0400] "get / HTTP/1.0" 200 1"#).is_err());
    }

    #[test]
    fn load_counts_skips() {
        let input = concat!(
            "a - - [01/Aug/1995:00:00:01 -0400] \"GET / HTTP/1.0\" 200 1\n",
            "b - - [01/Aug/1995:00:00:02 -0400] \"GET /x HTTP/1.0\" 200 2\r\n",
            "not a log line\n",
            "c - - [01/Aug/1995:00:00:03 -0400] \"GET /y HTTP/1.0\" 404 -",
        );
        let loaded = load_trace(input.as_bytes()).unwrap();
        assert_eq!(loaded.records.len(), 3);
        assert_eq!(loaded.skipped, 1);
        assert_eq!(loaded.records[2].host, "c");
    }

    #[test]
    fn load_empty_stream() {
        let loaded = load_trace(&b""[..]).unwrap();
        assert!(loaded.records.is_empty());
        assert_eq!(loaded.skipped, 0);
    }
}
