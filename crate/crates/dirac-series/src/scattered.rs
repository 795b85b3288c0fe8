pub fn fs_scattered() {} pub fn count_s() {} pub fn tables() {}
