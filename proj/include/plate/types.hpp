#pragma once

#include "plate/grid.hpp"

namespace plate {

using GridD = Grid<double>;
using FieldD = Field<double>;
using StateD = State<double>;

}  // namespace plate
