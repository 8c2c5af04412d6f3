# Dataset generation, neighbour search and file formats
