# geometry package: sphere geometry, surfaces of revolution and their maps
