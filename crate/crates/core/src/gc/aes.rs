//! AES rounds as a boolean circuit. The key owner supplies the expanded
//! round keys as inputs, so the circuit has no key schedule.

use super::builder::{Bit, CircuitBuilder};

/// The S-box on one byte (bit 0 least significant): 34 AND gates, depth 16.
pub fn sbox_circuit(b: &mut CircuitBuilder, byte: &[Bit]) -> Vec<Bit> {
    assert_eq!(byte.len(), 8);
    let u = |i: usize| byte[7 - i];
    let mut x = |p: Bit, q: Bit| b.xor(p, q);
    let t1 = x(u(0), u(3));
    let t2 = x(u(0), u(5));
    let t3 = x(u(0), u(6));
    let t4 = x(u(3), u(5));
    let t5 = x(u(4), u(6));
    let t6 = x(t1, t5);
    let t7 = x(u(1), u(2));
    let t8 = x(u(7), t6);
    let t9 = x(u(7), t7);
    let t10 = x(t6, t7);
    let t11 = x(u(1), u(5));
    let t12 = x(u(2), u(5));
    let t13 = x(t3, t4);
    let t14 = x(t6, t11);
    let t15 = x(t5, t11);
    let t16 = x(t5, t12);
    let t17 = x(t9, t16);
    let t18 = x(u(3), u(7));
    let t19 = x(t7, t18);
    let t20 = x(t1, t19);
    let t21 = x(u(6), u(7));
    let t22 = x(t7, t21);
    let t23 = x(t2, t22);
    let t24 = x(t2, t10);
    let t25 = x(t20, t17);
    let t26 = x(t3, t16);
    let t27 = x(t1, t12);

    let m1 = b.and(t13, t6);
    let m2 = b.and(t23, t8);
    let m3 = b.xor(t14, m1);
    let m4 = b.and(t19, u(7));
    let m5 = b.xor(m4, m1);
    let m6 = b.and(t3, t16);
    let m7 = b.and(t22, t9);
    let m8 = b.xor(t26, m6);
    let m9 = b.and(t20, t17);
    let m10 = b.xor(m9, m6);
    let m11 = b.and(t1, t15);
    let m12 = b.and(t4, t27);
    let m13 = b.xor(m12, m11);
    let m14 = b.and(t2, t10);
    let m15 = b.xor(m14, m11);
    let m16 = b.xor(m3, m2);
    let m17 = b.xor(m5, t24);
    let m18 = b.xor(m8, m7);
    let m19 = b.xor(m10, m15);
    let m20 = b.xor(m16, m13);
    let m21 = b.xor(m17, m15);
    let m22 = b.xor(m18, m13);
    let m23 = b.xor(m19, t25);
    let m24 = b.xor(m22, m23);
    let m25 = b.and(m22, m20);
    let m26 = b.xor(m21, m25);
    let m27 = b.xor(m20, m21);
    let m28 = b.xor(m23, m25);
    let m29 = b.and(m28, m27);
    let m30 = b.and(m26, m24);
    let m31 = b.and(m20, m23);
    let m32 = b.and(m27, m31);
    let m33 = b.xor(m27, m25);
    let m34 = b.and(m21, m22);
    let m35 = b.and(m24, m34);
    let m36 = b.xor(m24, m25);
    let m37 = b.xor(m21, m29);
    let m38 = b.xor(m32, m33);
    let m39 = b.xor(m23, m30);
    let m40 = b.xor(m35, m36);
    let m41 = b.xor(m38, m40);
    let m42 = b.xor(m37, m39);
    let m43 = b.xor(m37, m38);
    let m44 = b.xor(m39, m40);
    let m45 = b.xor(m42, m41);
    let m46 = b.and(m44, t6);
    let m47 = b.and(m40, t8);
    let m48 = b.and(m39, u(7));
    let m49 = b.and(m43, t16);
    let m50 = b.and(m38, t9);
    let m51 = b.and(m37, t17);
    let m52 = b.and(m42, t15);
    let m53 = b.and(m45, t27);
    let m54 = b.and(m41, t10);
    let m55 = b.and(m44, t13);
    let m56 = b.and(m40, t23);
    let m57 = b.and(m39, t19);
    let m58 = b.and(m43, t3);
    let m59 = b.and(m38, t22);
    let m60 = b.and(m37, t20);
    let m61 = b.and(m42, t1);
    let m62 = b.and(m45, t4);
    let m63 = b.and(m41, t2);

    let mut x = |p: Bit, q: Bit| b.xor(p, q);
    let l0 = x(m61, m62);
    let l1 = x(m50, m56);
    let l2 = x(m46, m48);
    let l3 = x(m47, m55);
    let l4 = x(m54, m58);
    let l5 = x(m49, m61);
    let l6 = x(m62, l5);
    let l7 = x(m46, l3);
    let l8 = x(m51, m59);
    let l9 = x(m52, m53);
    let l10 = x(m53, l4);
    let l11 = x(m60, l2);
    let l12 = x(m48, m51);
    let l13 = x(m50, l0);
    let l14 = x(m52, m61);
    let l15 = x(m55, l1);
    let l16 = x(m56, l0);
    let l17 = x(m57, l1);
    let l18 = x(m58, l8);
    let l19 = x(m63, l4);
    let l20 = x(l0, l1);
    let l21 = x(l1, l7);
    let l22 = x(l3, l12);
    let l23 = x(l18, l2);
    let l24 = x(l15, l9);
    let l25 = x(l6, l10);
    let l26 = x(l7, l9);
    let l27 = x(l8, l10);
    let l28 = x(l11, l14);
    let l29 = x(l11, l17);
    let s0 = x(l6, l24);
    let s1 = x(l16, l26);
    let s2 = x(l19, l28);
    let s3 = x(l6, l21);
    let s4 = x(l20, l22);
    let s5 = x(l25, l29);
    let s6 = x(l13, l27);
    let s7 = x(l6, l23);
    let s1 = b.not(s1);
    let s2 = b.not(s2);
    let s6 = b.not(s6);
    let s7 = b.not(s7);
    vec![s7, s6, s5, s4, s3, s2, s1, s0]
}

fn xtime(b: &mut CircuitBuilder, a: &[Bit]) -> Vec<Bit> {
    let hi = a[7];
    vec![hi, b.xor(a[0], hi), a[1], b.xor(a[2], hi), b.xor(a[3], hi), a[4], a[5], a[6]]
}

fn mix_column(b: &mut CircuitBuilder, col: &[Vec<Bit>]) -> Vec<Vec<Bit>> {
    let doubled: Vec<Vec<Bit>> = col.iter().map(|a| xtime(b, a)).collect();
    (0..4)
        .map(|r| {
            // 2*a[r] ^ 3*a[r+1] ^ a[r+2] ^ a[r+3]
            let (i1, i2, i3) = ((r + 1) % 4, (r + 2) % 4, (r + 3) % 4);
            (0..8)
                .map(|k| {
                    let t = b.xor(doubled[r][k], doubled[i1][k]);
                    let t = b.xor(t, col[i1][k]);
                    let t = b.xor(t, col[i2][k]);
                    b.xor(t, col[i3][k])
                })
                .collect()
        })
        .collect()
}

/// Encrypts a 128-bit block under the given round keys
/// (`round_keys.len() - 1` rounds). Block bit `k` is bit `k % 8` of byte
/// `k / 8`, matching little-endian conversion of `u128` blocks.
pub fn aes_circuit(b: &mut CircuitBuilder, input: &[Bit], round_keys: &[Vec<Bit>]) -> Vec<Bit> {
    assert_eq!(input.len(), 128);
    let rounds = round_keys.len() - 1;
    let mut state: Vec<Vec<Bit>> =
        (0..16).map(|i| b.xor_vec(&input[8 * i..8 * i + 8], &round_keys[0][8 * i..8 * i + 8])).collect();
    for (r, key) in round_keys.iter().enumerate().skip(1) {
        let sub: Vec<Vec<Bit>> = state.iter().map(|byte| sbox_circuit(b, byte)).collect();
        let mut shifted = vec![Vec::new(); 16];
        for c in 0..4 {
            for row in 0..4 {
                shifted[row + 4 * c] = sub[row + 4 * ((c + row) % 4)].clone();
            }
        }
        let mixed = if r != rounds {
            (0..4).flat_map(|c| mix_column(b, &shifted[4 * c..4 * c + 4])).collect()
        } else {
            shifted
        };
        state = mixed.iter().enumerate().map(|(i, byte)| b.xor_vec(byte, &key[8 * i..8 * i + 8])).collect();
    }
    state.concat()
}
