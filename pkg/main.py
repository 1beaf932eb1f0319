#!/usr/bin/env python3
"""
两材料隔热杆界面位置反演工具 (thermiface)
主程序入口
"""
import sys
from pathlib import Path

# 添加src目录到Python路径
current_dir = Path(__file__).parent
src_dir = current_dir / 'src'
sys.path.insert(0, str(src_dir))


def main():
    """主函数，退出码由命令行层决定"""
    try:
        from src.cli import run
    except ImportError as e:
        print(f"❌ 导入模块失败: {e}", file=sys.stderr)
        print("请确保所有依赖都已正确安装: pip install -r requirements.txt", file=sys.stderr)
        sys.exit(1)

    try:
        sys.exit(run())
    except KeyboardInterrupt:
        print("\n\n⚠️  用户取消操作", file=sys.stderr)
        sys.exit(130)


if __name__ == '__main__':
    main()
