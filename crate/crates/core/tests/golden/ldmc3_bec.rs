// Ascending power-basis coefficients of E_d for LDMC(3) over the BEC, d = 0..=5.
const GOLDEN_LOW: [&[f64]; 6] = [
    &[0.5],
    &[0.25],
    &[0.25, -0.25, 0.25, -0.25, 0.125],
    &[0.15625, -0.09375, 4.44e-16, -0.1875, 0.46875, -0.46875, 0.1875],
    &[0.15625, -0.3125, 0.65625, -1.6875, 3.28125, -4.3125, 3.71875, -1.9375, 0.46875],
    &[
        0.103515625, -0.126953125, 0.0390625, -0.4296875, 2.24609375, -6.15234375, 10.9765625, -13.0859375,
        10.087890625, -4.58007812500001, 0.9375,
    ],
];

// Descending power-basis coefficients for d = 6..=10.
const GOLDEN_HIGH: [&[f64]; 5] = [
    &[
        2.2900390625, -14.455078125, 42.9462890624997, -79.5214843749996, 102.12890625, -95.5664062499994,
        66.5722656249995, -34.7460937499998, 13.5791015624999, -3.99414062499997, 0.981445312499996, -0.310546875,
        0.103515625,
    ],
    &[
        5.05517578125, -36.368896484375, 121.872802734375, -251.26171875, 354.7236328125, -361.612548828124,
        274.061279296874, -156.953124999999, 68.3422851562493, -22.3791503906245, 5.18676757812476,
        -0.68359374999993, 0.0820312499999894, -0.131591796874999, 0.070556640625,
    ],
    &[
        12.2824707031249, -104.389648437499, 421.901855468746, -1078.21191406248, 1953.12304687496,
        -2661.41503906243, 2821.08544921866, -2368.68652343741, 1587.56103515619, -849.672851562463,
        361.467285156233, -121.303710937495, 31.8554687499987, -6.56933593749975, 1.18603515624997,
        -0.282226562499999, 0.070556640625,
    ],
    &[
        28.517944335937, -270.209632873528, 1213.44797515864, -3426.34039306621, 6803.52593994091,
        -10066.1437683096, 11474.6510925279, -10284.0617065415, 7337.84271240106, -4200.8187103263,
        1938.88133239697, -722.934997558378, 216.904724121012, -51.2509460448973, 8.86129760741628,
        -0.913879394530327, 0.115905761718657, -0.122840881347652, 0.0489273071289062,
    ],
    &[
        69.4315452575683, -742.947502136231, 3808.84984970093, -12453.0257034302, 29158.0880355837,
        -52039.3605651862, 73535.9429168715, -84300.01968384, 79613.6392593413, -62487.5754547145,
        40908.980049135, -22326.4821624763, 10117.3594665529, -3780.88119506833, 1154.60105895993,
        -285.082305908195, 56.3512229919426, -8.95305633544941, 1.28042221069343, -0.244636535644538,
        0.0489273071289063,
    ],
];

fn golden(d: usize) -> Vec<f64> {
    if d < GOLDEN_LOW.len() {
        GOLDEN_LOW[d].to_vec()
    } else {
        GOLDEN_HIGH[d - GOLDEN_LOW.len()].iter().rev().copied().collect()
    }
}
