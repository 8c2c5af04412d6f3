# Training loop and optimizer
