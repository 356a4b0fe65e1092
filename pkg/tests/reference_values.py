"""Frozen reference values computed with mpmath at 50 digits.

normal: 0.5 * erfc(x / sqrt(2)); chi-square(1): upper regularized gamma
Q(1/2, x/2); Student t: adaptive quadrature of the t density from x to
infinity (independent of the incomplete-beta route used by the package).
"""

NORMAL_SF = [
    (-6, 0.99999999901341235496),
    (-4, 0.99996832875816688008),
    (-3, 0.99865010196836990547),
    (-2.5, 0.99379033467422386483),
    (-2, 0.9772498680518207928),
    (-1.5, 0.933192798731141934),
    (-1, 0.84134474606854294859),
    (-0.5, 0.69146246127401310364),
    (-0.1, 0.53982783727702898367),
    (0, 0.5),
    (0.1, 0.46017216272297101633),
    (0.5, 0.30853753872598689636),
    (1, 0.15865525393145705141),
    (1.5, 0.066807201268858066004),
    (1.959964, 0.024999999096442401994),
    (2, 0.0227501319481792072),
    (2.5, 0.006209665325776135167),
    (3, 0.0013498980316300945267),
    (3.5, 0.00023262907903552503635),
    (4, 0.000031671241833119921254),
    (5, 2.8665157187919391167e-7),
    (6, 9.865876450376981407e-10),
    (7, 1.2798125438858350044e-12),
    (8, 6.2209605742717841235e-16),
    (10, 7.619853024160526066e-24),
]

CHISQ1_SF = [
    (0, 1.0),
    (0.001, 0.97477287936996038828),
    (0.01, 0.92034432544594203624),
    (0.1, 0.75182963404584927583),
    (0.3, 0.58388242077036517865),
    (0.5, 0.47950012218695346232),
    (1, 0.31731050786291410283),
    (1.5, 0.2206713619198467926),
    (2, 0.15729920705028513066),
    (2.706, 0.099971378125259318479),
    (3, 0.083264516663550401855),
    (3.841, 0.050013683763956699076),
    (5, 0.025347318677468263932),
    (6.635, 0.0099994195740425249697),
    (7.879, 0.0050012127274906845302),
    (10, 0.0015654022580025496775),
    (10.83, 0.00099868637918025874488),
    (12, 0.00053200550513924969929),
    (15, 0.00010751117672950056338),
    (20, 7.7442164310440836377e-6),
    (25, 5.7330314375838782335e-7),
    (30, 4.3204630578274972948e-8),
    (40, 2.5396285894708649707e-10),
    (50, 1.5374597944280348502e-12),
    (60, 9.4857375710738483885e-15),
]

STUDENT_T_SF = [
    (-5, 3, 0.99230378096334884951),
    (-2, 1, 0.85241638234956672582),
    (-1, 2.5, 0.79796948636086326682),
    (-0.5, 10, 0.68605319712851352865),
    (0, 5, 0.5),
    (0.2, 1, 0.43716704181099881279),
    (0.5, 30, 0.31036150244256364298),
    (1, 1, 0.25),
    (1, 4.3, 0.18510519645214377566),
    (1.5, 7, 0.088649243494985016577),
    (2, 2, 0.091751709536136983634),
    (2, 12.6, 0.033765614523886259038),
    (2.5, 100, 0.0070228945620385887038),
    (3, 3, 0.028834442811218654289),
    (3, 4675.2, 0.0013570176045091243259),
    (-8.185694, 4675, 0.99999999999999982707),
    (4, 8, 0.0019748864017226629051),
    (5, 20, 0.000034365142897710986567),
    (6, 50, 1.0944697425399963577e-7),
    (8, 200, 4.9396004546653196096e-14),
    (10, 1, 0.031725517430553569515),
    (12, 3, 0.000622507900394668369),
    (20, 5, 2.8877581866120860461e-6),
    (0.01, 0.7, 0.49705375629818677774),
    (-3, 15.5, 0.99564169473084746717),
]

# Duration-weighted 2x2 tables (A1, A2, B1, B2) in seconds, one per
# center/kind row of the reported chi-square results.
CHI_SQUARE_TABLE_ROWS = {
    ("A", "dec"): (2497.75, 29532.3, 7742.75, 692466.2),
    ("A", "acc"): (25977.85, 16865.7, 164394.75, 525000.7),
    ("B", "dec"): (2915.7, 86543.1, 15213.25, 2026977.95),
    ("B", "acc"): (17139.6, 78186.0, 134134.25, 1902190.15),
}

# (mean, sd) for center A (n=1425 events) and B (n=3252), reported t.
EVENT_FEATURE_ROWS = {
    "nadir": ((92.43, 2.22), (93.04, 2.61), -8.07),
    "drop": ((4.10, 1.83), (4.11, 2.16), -0.18),
    "duration": ((37.35, 26.37), (31.06, 21.03), 7.86),
    "burden_area": ((93.61, 85.13), (79.22, 94.65), 3.44),
}
N_EVENTS_A, N_EVENTS_B = 1425, 3252
