# spherex package
