use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A configuration file under construction whose setting values can later be
/// swapped for injected ones.
#[derive(Debug, Clone, Default)]
pub struct Doc {
    lines: Vec<String>,
    slots: Vec<Slot>,
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    line: usize,
    start: usize,
    len: usize,
}

const COMMENT_NOISE: &[&str] = &[
    "This is the main configuration file.",
    "See the documentation for details.",
    "Do NOT simply read the instructions in here without understanding",
    "what they do.  They're here only as hints or reminders.",
    "Uncomment the following line to enable it",
    "Change this to suit your site",
    "Managed by the deployment scripts",
    "The values below are tuned for a small instance",
    "Settings added locally",
];

impl Doc {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn blank(&mut self) {
        self.lines.push(String::new());
    }

    /// `prefix` + `value` + `suffix` on one line; the value is injectable.
    pub fn setting(&mut self, prefix: &str, value: &str, suffix: &str) {
        self.slots.push(Slot {
            line: self.lines.len(),
            start: prefix.len(),
            len: value.len(),
        });
        self.lines.push(format!("{prefix}{value}{suffix}"));
    }

    /// With probability `p`, a comment line of harmless prose (or a
    /// commented-out setting) in the given comment style.
    pub fn noise(&mut self, rng: &mut ChaCha8Rng, marker: &str, indent: &str, p: f64, commented_setting: &str) {
        if !rng.random_bool(p) {
            return;
        }
        if !commented_setting.is_empty() && rng.random_bool(0.3) {
            self.lines.push(format!("{indent}{marker}{commented_setting}"));
        } else {
            let text = COMMENT_NOISE[rng.random_range(0..COMMENT_NOISE.len())];
            self.lines.push(format!("{indent}{marker} {text}"));
        }
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    /// Current value of slot `i` and its 1-based line number.
    pub fn slot_value(&self, i: usize) -> (&str, usize) {
        let s = self.slots[i];
        (&self.lines[s.line][s.start..s.start + s.len], s.line + 1)
    }

    pub fn replace_slot(&mut self, i: usize, value: &str) {
        let s = self.slots[i];
        self.lines[s.line].replace_range(s.start..s.start + s.len, value);
        let delta = value.len() as isize - s.len as isize;
        self.slots[i].len = value.len();
        for other in self.slots.iter_mut().filter(|o| o.line == s.line && o.start > s.start) {
            other.start = (other.start as isize + delta) as usize;
        }
    }

    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

/// A plausible but wrong replacement for `value`: numbers are scaled as if the
/// unit were misread, anything else gets a typo.
pub fn outlier_value(value: &str, attempt: u32) -> String {
    if let Ok(n) = value.parse::<u64>() {
        return (n.saturating_mul(1024) + u64::from(attempt)).to_string();
    }
    let mut chars: Vec<char> = value.chars().collect();
    match attempt {
        0 if chars.len() > 2 => {
            let last = chars.len() - 1;
            chars.swap(last - 1, last);
            if chars.iter().collect::<String>() == value {
                chars.push('x');
            }
        }
        _ => {
            chars.push('_');
            chars.extend(attempt.to_string().chars());
        }
    }
    chars.into_iter().collect()
}
