# transforms package: fields, spherical and spherical mean transforms
