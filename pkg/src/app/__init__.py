# app package: cli and http api
