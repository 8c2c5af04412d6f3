# Oracles and measurements
