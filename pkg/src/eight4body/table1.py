"""Published initial conditions of symmetric periodic orbits.

Columns: row number, T0/Tbar, T/Tbar, x4, vy4. Every orbit starts at
``(x4, 0)`` with velocity ``(0, vy4)`` while the primaries sit at their
initial isosceles configuration.
"""

from __future__ import annotations

from typing import NamedTuple


class Table1Row(NamedTuple):
    index: int
    T0_over_Tbar: int
    T_over_Tbar: int
    x4: float
    vy4: float


TABLE1 = tuple(Table1Row(*r) for r in [
    (1, 8, 48, -1.151372102323705, 1.192735308310391),
    (2, 6, 12, 0.392064354827005, -2.088580677571261),
    (3, 6, 12, 1.145057806500420, 4.421084342099486),
    (4, 20, 120, 0.261908739769502, 0.768218486423285),
    (5, 6, 12, 1.231780839019731, 3.098731109349930),
    (6, 2, 12, 1.364108936002170, 2.676664885954700),
    (7, 2, 12, 1.557889835185201, 1.732435901189350),
    (8, 4, 24, 1.465940005977230, 2.259081336057390),
    (9, 8, 48, 2.280410388953660, 1.110720371401547),
    (10, 10, 60, 2.403183107401021, 1.143021410598030),
    (11, 12, 24, 2.559935679202217, 1.131013972457270),
    (12, 14, 84, 2.727991976218170, 1.106651149430582),
    (13, 16, 96, 2.917809831461645, 1.071706543150445),
    (14, 18, 36, 3.120691699353664, 1.033349295535902),
    (15, 20, 120, 3.328354859295013, 0.996039191967667),
    (16, 22, 132, 3.533520671511424, 0.962303086050867),
    (17, 24, 48, 3.734052676172197, 0.932325325122930),
    (18, 26, 156, 3.929756244211741, 0.905635308058075),
    (19, 28, 168, 4.120942435281265, 0.881706024834630),
    (20, 30, 60, 4.307972049253366, 0.860093902208141),
    (21, 32, 192, 4.491174076273875, 0.840442308932970),
    (22, 34, 204, 4.670837162699625, 0.822465134430957),
    (23, 36, 72, 4.847214688965527, 0.805930897509638),
    (24, 38, 228, 5.020530247022094, 0.790650437478274),
    (25, 40, 240, 5.190982479530962, 0.776467608355671),
    (26, 42, 84, 5.358748764439068, 0.763252315834217),
    (27, 44, 264, 5.523988373388391, 0.750895210415233),
    (28, 46, 276, 5.686844913076257, 0.739303645791943),
    (29, 48, 96, 5.847448514845465, 0.728398528559842),
    (30, 50, 300, 6.005917432292149, 0.718111887323824),
    (31, 52, 312, 6.162359623497286, 0.708384923725778),
    (32, 54, 108, 6.316873887698146, 0.699166486221477),
    (33, 56, 336, 6.469550993413046, 0.690411825225105),
    (34, 58, 348, 6.620474509569266, 0.682081600922888),
])


def row(index: int) -> Table1Row:
    if not 1 <= index <= len(TABLE1):
        raise IndexError(f"Table 1 has rows 1..{len(TABLE1)}, got {index}")
    return TABLE1[index - 1]
