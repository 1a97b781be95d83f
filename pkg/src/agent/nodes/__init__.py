# experiment nodes package
