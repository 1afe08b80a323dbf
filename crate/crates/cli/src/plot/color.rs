//! Palettes.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub fn hex(self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }

    fn lerp(self, other: Rgb, t: f64) -> Rgb {
        let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
        Rgb(mix(self.0, other.0), mix(self.1, other.1), mix(self.2, other.2))
    }
}

pub const NEUTRAL: Rgb = Rgb(255, 255, 255);
pub const POSITIVE: Rgb = Rgb(33, 102, 172);
pub const NEGATIVE: Rgb = Rgb(178, 24, 43);

/// Diverging scale: white at zero, saturating to blue for positive and red
/// for negative values at `±max`.
pub fn diverging(v: f64, max: f64) -> Rgb {
    if max <= 0.0 || v == 0.0 {
        return NEUTRAL;
    }
    let t = (v / max).clamp(-1.0, 1.0);
    if t > 0.0 {
        NEUTRAL.lerp(POSITIVE, t)
    } else {
        NEUTRAL.lerp(NEGATIVE, -t)
    }
}

/// Blue for the first index through red for the last.
pub fn rainbow(i: usize, n: usize) -> Rgb {
    let t = if n <= 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
    hsv(240.0 * (1.0 - t), 0.85, 0.9)
}

const CATEGORICAL: [Rgb; 10] = [
    Rgb(31, 119, 180),
    Rgb(255, 127, 14),
    Rgb(44, 160, 44),
    Rgb(214, 39, 40),
    Rgb(148, 103, 189),
    Rgb(140, 86, 75),
    Rgb(227, 119, 194),
    Rgb(127, 127, 127),
    Rgb(188, 189, 34),
    Rgb(23, 190, 207),
];

pub fn categorical(k: usize) -> Rgb {
    CATEGORICAL[k % CATEGORICAL.len()]
}

fn hsv(h: f64, s: f64, v: f64) -> Rgb {
    let c = v * s;
    let hp = (h / 60.0).rem_euclid(6.0);
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let byte = |u: f64| ((u + m) * 255.0).round() as u8;
    Rgb(byte(r), byte(g), byte(b))
}
