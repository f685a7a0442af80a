#pragma once

/// Clebsch-Gordan coefficient from the Racah sum in exact rational
/// arithmetic; projections are twice their value. Independent of the library.
double exact_cg(int two_j1, int two_m1, int two_j2, int two_m2, int two_j, int two_m);
