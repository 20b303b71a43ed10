"""Published error tables for the two-body benchmark.

Each entry maps a method label to rows ``(h, dy1, dy2)`` where ``dy`` is the
log10 of the max-norm error over [0, 20].
"""

TABLE_E05_GAUSS = {
    "FRKN2G": [
        (1 / 2, -0.1555, -0.0703), (1 / 4, -1.4358, -1.2576), (1 / 8, -3.0069, -2.7745),
        (1 / 16, -4.1495, -3.9321), (1 / 32, -5.3323, -5.1172), (1 / 64, -6.5308, -6.3167),
        (1 / 128, -7.7340, -7.5201), (1 / 256, -8.9457, -8.7315),
    ],
    "RKN2G": [
        (1 / 2, -0.0643, -0.0009), (1 / 4, -1.4889, -1.3038), (1 / 8, -3.1459, -2.8956),
        (1 / 16, -4.2650, -4.0354), (1 / 32, -5.4399, -5.2148), (1 / 64, -6.6365, -6.4128),
        (1 / 128, -7.8388, -7.6154), (1 / 256, -9.0424, -8.8192),
    ],
}

TABLE_E001_GAUSS = {
    "FRKN2G": [
        (1 / 2, -4.0500, -3.7300), (1 / 4, -5.1726, -4.8342), (1 / 8, -6.3231, -6.0228),
        (1 / 16, -7.5164, -7.2231), (1 / 32, -8.7176, -8.4263), (1 / 64, -9.9273, -9.6343),
        (1 / 128, -11.5489, -11.1156),
    ],
    "RKN2G": [
        (1 / 2, -2.3942, -2.4200), (1 / 4, -3.5973, -3.5971), (1 / 8, -4.8289, -4.8213),
        (1 / 16, -6.0429, -6.0354), (1 / 32, -7.2502, -7.2426), (1 / 64, -8.4551, -8.4475),
        (1 / 128, -9.6596, -9.6519),
    ],
}

_H3 = [2.0 ** -k for k in range(4, 12)]
TABLE_E05_GENERIC = {
    "FRKN2": list(zip(_H3, [-0.6175, -1.2154, -1.8149, -2.4154, -3.0166, -3.6182, -4.2201, -4.8220],
                      [-0.4361, -1.0278, -1.6267, -2.2272, -2.8284, -3.4300, -4.0318, -4.6338])),
    "FRKN2x": list(zip(_H3, [-1.3312, -2.2383, -3.1432, -4.0471, -4.9506, -5.8540, -6.7573, -7.6647],
                       [-1.1528, -2.0605, -2.9656, -3.8696, -4.7732, -5.6765, -6.5799, -7.4872])),
    "RKN2": list(zip(_H3, [-0.5945, -1.1917, -1.7909, -2.3912, -2.9924, -3.5939, -4.1957, -4.7977],
                     [-0.4147, -1.0048, -1.6034, -2.2037, -2.8049, -3.4064, -4.0083, -4.6102])),
    "RKN2x": list(zip(_H3, [-1.3046, -2.2152, -3.1217, -4.0265, -4.9305, -5.8340, -6.7373, -7.6405],
                      [-1.1290, -2.0402, -2.9470, -3.8519, -4.7559, -5.6595, -6.5628, -7.4660])),
}

_H4 = [2.0 ** -k for k in range(3, 11)]
TABLE_E001_GENERIC = {
    "FRKN2": list(zip(_H4, [-2.7401, -3.3446, -3.9454, -4.5469, -5.1486, -5.7505, -6.3525, -6.9547],
                      [-2.6147, -3.2180, -3.8201, -4.4222, -5.0242, -5.6263, -6.2283, -6.8305])),
    "FRKN2x": list(zip(_H4, [-3.8219, -4.7298, -5.6354, -6.5398, -7.4437, -8.3477, -9.2636, -10.4191],
                       [-3.9469, -4.8702, -5.7843, -6.6932, -7.5993, -8.5049, -9.4296, -10.8514])),
    "RKN2": list(zip(_H4, [-1.7383, -2.3078, -2.8940, -3.4884, -4.0866, -4.6868, -5.2879, -5.8895],
                     [-1.7175, -2.2835, -2.8680, -3.4614, -4.0592, -4.6592, -5.2602, -5.8617])),
    "RKN2x": list(zip(_H4, [-1.7393, -2.6401, -3.5427, -4.4457, -5.3487, -6.2517, -7.1548, -8.0579],
                      [-1.7567, -2.6591, -3.5620, -4.4649, -5.3679, -6.2710, -7.1741, -8.0772])),
}
