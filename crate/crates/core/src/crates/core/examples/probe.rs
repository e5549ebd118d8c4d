use relqm_core::bridge::*;
use relqm_core::chart::{AxisGrid, CoordinateChart};
fn main() {
    let hw = 1.8; let (n_re, n_im) = (25usize, 13usize);
    let d_re = 2.0 * hw / (n_re as f64 - 1.0);
    let d_im = 2.0 * hw / (n_im as f64 - 1.0);
    let ch = CoordinateChart::single(AxisGrid::new("x", -hw, d_re, n_re, -hw, d_im, n_im).unwrap()).unwrap();
    let fixture = LimitFixture { horizon: 1.0, ..LimitFixture::default() };
    for omega in [8.0, 16.0, 32.0, 64.0, 128.0] {
        let (rep, slow, ka) = fixture.run_with_series(&ch, omega).unwrap();
        let mid = slow.n_frames() / 2;
        let zeros = vec![0.0; slow.n_frames()];
        let (_, rms0) = schrodinger_residual(&slow, &zeros, omega, mid).unwrap();
        let (_, rms_ka) = schrodinger_residual(&slow, &ka, omega, mid).unwrap();
        println!("omega {omega:>6}: frames {} dt_f {:.4} max_l2 {:.5e} rms(ka=0) {:.4e} rms(ka) {:.4e} slowness {:.3}", slow.n_frames(), slow.dt, rep.max_l2, rms0, rms_ka, rep.slowness);
    }
}
