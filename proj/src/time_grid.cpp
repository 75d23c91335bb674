#include "tdbem/time_grid.hpp"

// Header-only; this translation unit anchors the module in the library.
