//! Conversions from the lab units used in experiment logs to SI.

pub const PA_PER_BAR: f64 = 1e5;

pub fn mm_to_m(mm: f64) -> f64 {
    mm / 1e3
}

pub fn m_to_mm(m: f64) -> f64 {
    m * 1e3
}

pub fn bar_to_pa(bar: f64) -> f64 {
    bar * PA_PER_BAR
}

pub fn pa_to_bar(pa: f64) -> f64 {
    pa / PA_PER_BAR
}

pub fn cm2_to_m2(cm2: f64) -> f64 {
    cm2 / 1e4
}

pub fn deg_to_rad(deg: f64) -> f64 {
    deg.to_radians()
}

pub fn rad_to_deg(rad: f64) -> f64 {
    rad.to_degrees()
}
