//! Minimal ISO-8601 timestamp parsing.
//!
//! Accepts the forms that show up in comment dumps: `YYYY-MM-DD`,
//! `YYYY-MM-DDTHH:MM:SS` with an optional fractional second (ignored) and
//! an optional zone of `Z`, `±HH:MM` or `±HHMM`. Everything is converted
//! to UTC epoch seconds; no timezone database is needed because only
//! numeric offsets are accepted.

/// Days from 1970-01-01 to the given civil date (proleptic Gregorian).
fn days_from_civil(year: i64, month: u32, day: u32) -> i64 {
    let y = if month <= 2 { year - 1 } else { year };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let mp = (month as i64 + 9) % 12;
    let doy = (153 * mp + 2) / 5 + day as i64 - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

fn days_in_month(year: i64, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 => {
            let leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
            if leap {
                29
            } else {
                28
            }
        }
        _ => 0,
    }
}

fn parse_int(s: &str) -> Option<i64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Parse an ISO-8601 timestamp (see module docs) into UTC epoch seconds.
pub fn parse_epoch_seconds(text: &str) -> Option<i64> {
    let text = text.trim();
    let (date_part, rest) = match text.find('T') {
        Some(i) => (&text[..i], Some(&text[i + 1..])),
        None => (text, None),
    };

    let mut date_fields = date_part.split('-');
    let year = parse_int(date_fields.next()?)?;
    let month = parse_int(date_fields.next()?)? as u32;
    let day = parse_int(date_fields.next()?)? as u32;
    if date_fields.next().is_some() {
        return None;
    }
    if !(1..=12).contains(&month) || day < 1 || day > days_in_month(year, month) {
        return None;
    }

    let mut secs_of_day = 0i64;
    let mut offset_secs = 0i64;

    if let Some(rest) = rest {
        // Split the zone suffix off the time.
        let (time_part, zone) = match rest.find(['Z', 'z', '+']) {
            Some(i) => (&rest[..i], Some(&rest[i..])),
            None => match rest.rfind('-') {
                // A '-' inside the time can only start a zone offset.
                Some(i) => (&rest[..i], Some(&rest[i..])),
                None => (rest, None),
            },
        };

        let mut time_fields = time_part.split(':');
        let hour = parse_int(time_fields.next()?)?;
        let minute = parse_int(time_fields.next()?)?;
        let second_field = time_fields.next().unwrap_or("0");
        let second = parse_int(second_field.split('.').next()?)?;
        if time_fields.next().is_some() {
            return None;
        }
        if !(0..24).contains(&hour) || !(0..60).contains(&minute) || !(0..61).contains(&second) {
            return None;
        }
        secs_of_day = hour * 3600 + minute * 60 + second.min(59);

        if let Some(zone) = zone {
            offset_secs = parse_zone(zone)?;
        }
    }

    let days = days_from_civil(year, month, day);
    Some(days * 86_400 + secs_of_day - offset_secs)
}

/// `Z`, `±HH:MM`, `±HHMM` or `±HH` → seconds east of UTC.
fn parse_zone(zone: &str) -> Option<i64> {
    if zone == "Z" || zone == "z" {
        return Some(0);
    }
    let (sign, digits) = match zone.as_bytes().first()? {
        b'+' => (1, &zone[1..]),
        b'-' => (-1, &zone[1..]),
        _ => return None,
    };
    let compact: String = digits.chars().filter(|c| *c != ':').collect();
    let (h, m) = match compact.len() {
        2 => (parse_int(&compact)?, 0),
        4 => (parse_int(&compact[..2])?, parse_int(&compact[2..])?),
        _ => return None,
    };
    if h > 23 || m > 59 {
        return None;
    }
    Some(sign * (h * 3600 + m * 60))
}
